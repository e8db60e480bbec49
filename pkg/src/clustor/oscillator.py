"""Harmonic oscillator clustor.

Natural units: mass m, length L = sqrt(ħ/(m ω_N)), time T = 1/ω_N, so that
ħ = m = ω_N = μ = 1, momentum is measured in ħμ and the Newtonian period is
τ_N = 2π.  The dimensionless energy is η = E/(ħω_N) - 1/2 >= -1/2.

The basis is psi1 = M11 exp(-x²/2), psi2 = x M33 exp(-x²/2) with the
abbreviated Kummer functions Mij = M((i - 2η - 1)/4, j/2, x²).  Every
closed form below is a ratio of expressions homogeneous in the Mij, so the
exponentially scaled values exp(-x²) Mij are used throughout; this keeps the
evaluation finite up to the series guard |x| <= 30.

Action values are returned in units of ħ, full-cycle actions J in units of h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy import integrate

from .errors import NoConvergence, NormalizationFailure, OutsideTurningPoints, SeriesOverflow, ValidationError
from .kinematics import BasisEval, DynamicsPoint, ReferenceData, time_slope_at
from .specfun import PhaseTrack, Z_MAX, kummer_m, kummer_m_and_ma, unwrap_phase

__all__ = [
    "OscConfig",
    "MijEval",
    "mij_eval",
    "osc_basis",
    "osc_dynamics",
    "osc_dynamics_grid",
    "osc_world_line",
    "newtonian_osc",
    "newtonian_osc_grid",
    "osc_period",
    "omega_ratio",
    "full_cycle_action",
    "action_step_positions",
    "osc_density",
    "newtonian_density",
    "ground_state_density",
    "DensityResult",
    "Step",
    "ScanResult",
    "detect_steps",
    "quantization_scan",
    "X_MAX",
    "TAU_N",
]

X_MAX = math.sqrt(Z_MAX)
TAU_N = 2.0 * math.pi
_MAX_STEP = 0.02


@dataclass(frozen=True)
class OscConfig:
    """Oscillator energy η and reference-point constants.

    ``a`` scales A from its Newtonian value, A = a sqrt(2η + 1).  ``C``
    defaults to the Newtonian value 2/(2η + 1); B and D default to 0.
    """

    eta: float
    a: float = 1.0
    B: float = 0.0
    C: Optional[float] = None
    D: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.eta) or self.eta <= -0.5:
            raise ValidationError(
                "eta must exceed -1/2 (A vanishes at eta = -1/2), got %r" % (self.eta,)
            )
        if not (np.isfinite(self.a) and self.a > 0):
            raise ValidationError("a must be positive, got %r" % (self.a,))
        for name in ("B", "D"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError("%s must be finite" % name)
        if self.C is not None and not np.isfinite(self.C):
            raise ValidationError("C must be finite")

    @property
    def A(self) -> float:
        return self.a * math.sqrt(2.0 * self.eta + 1.0)

    @property
    def C_value(self) -> float:
        return 2.0 / (2.0 * self.eta + 1.0) if self.C is None else float(self.C)

    @property
    def energy(self) -> float:
        return self.eta + 0.5

    @property
    def turning_point(self) -> float:
        return math.sqrt(2.0 * self.eta + 1.0)

    @property
    def quasi_newtonian(self) -> bool:
        return self.a == 1.0 and self.B == 0.0 and self.D == 0.0 and (
            self.C is None or self.C == 2.0 / (2.0 * self.eta + 1.0)
        )

    def reference(self) -> ReferenceData:
        """Reference constants in natural units."""
        A, B, C, D = self.A, self.B, self.C_value, self.D
        p0 = A
        px0 = 2.0 * A * B
        tx0 = C * A / 2.0
        txx0 = (D * p0**2 + 2.0 * px0 * tx0) / p0
        return ReferenceData(energy=self.energy, x0=0.0, p0=p0, px0=px0, tx0=tx0, txx0=txx0)


@dataclass
class MijEval:
    """exp(-x²)-scaled abbreviated Kummer functions at a set of points."""

    M11: np.ndarray
    M31: np.ndarray
    M33: np.ndarray
    M53: np.ndarray
    M11_a: Optional[np.ndarray] = None
    M33_a: Optional[np.ndarray] = None


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > X_MAX):
        raise SeriesOverflow("|mu x| = %g exceeds the series guard %g" % (np.max(np.abs(x)), X_MAX))
    return x


def mij_eval(eta: float, x, with_a: bool = True, scaled: bool = True) -> MijEval:
    """M11, M31, M33, M53 (and M11_a, M33_a) at mu x = ``x``."""
    x = _check_x(x)
    z = x * x
    a1 = -eta / 2.0
    a3 = (1.0 - eta) / 2.0
    if with_a:
        m11, m11a = kummer_m_and_ma(a1, 0.5, z, scaled=scaled)
        m33, m33a = kummer_m_and_ma(a3, 1.5, z, scaled=scaled)
    else:
        m11 = kummer_m(a1, 0.5, z, scaled=scaled)
        m33 = kummer_m(a3, 1.5, z, scaled=scaled)
        m11a = m33a = None
    m31 = kummer_m(a1 + 0.5, 0.5, z, scaled=scaled)
    m53 = kummer_m(a3 + 0.5, 1.5, z, scaled=scaled)
    return MijEval(np.asarray(m11), np.asarray(m31), np.asarray(m33), np.asarray(m53),
                   None if m11a is None else np.asarray(m11a), None if m33a is None else np.asarray(m33a))


def osc_basis(eta: float, x, scaled: bool = False) -> BasisEval:
    """psi1, psi2 and their x-, E- and mixed derivatives at mu x = ``x``.

    With ``scaled=True`` every per-point value is multiplied by exp(-x²/2)
    (the reference constants are untouched); W, p and t are unchanged by
    such a common factor, and the values stay finite for large |x|.
    The energy derivative uses d a / d E = -1/2 in natural units.
    """
    x = _check_x(x)
    z = x * x
    a1 = -eta / 2.0
    a3 = (1.0 - eta) / 2.0
    m11, m11a = kummer_m_and_ma(a1, 0.5, z, scaled=True)
    m33, m33a = kummer_m_and_ma(a3, 1.5, z, scaled=True)
    n11, n11a = kummer_m_and_ma(a1 + 1.0, 1.5, z, scaled=True)
    n33, n33a = kummer_m_and_ma(a3 + 1.0, 2.5, z, scaled=True)
    m11z = (a1 / 0.5) * n11
    m33z = (a3 / 1.5) * n33
    m11za = (a1 / 0.5) * n11a + n11 / 0.5
    m33za = (a3 / 1.5) * n33a + n33 / 1.5
    # exp(-z) M times exp(z/2) gives the true exp(-z/2) M
    g = np.ones_like(z) if scaled else np.exp(z / 2.0)
    dadE = -0.5
    psi1 = g * m11
    psi2 = g * x * m33
    psi1_x = g * (2.0 * x * m11z - x * m11)
    psi2_x = g * (m33 + 2.0 * z * m33z - z * m33)
    psi1_E = g * dadE * m11a
    psi2_E = g * dadE * x * m33a
    psi1_xE = g * dadE * (2.0 * x * m11za - x * m11a)
    psi2_xE = g * dadE * (m33a + 2.0 * z * m33za - z * m33a)
    return BasisEval(psi1, psi2, psi1_x, psi2_x, psi1_E, psi2_E, psi1_xE, psi2_xE,
                     psi1_0=1.0, psi2_0=0.0, psi1_x0=0.0, psi2_x0=1.0)


def _pair(cfg: OscConfig):
    A, B, eta = cfg.A, cfg.B, cfg.eta

    def pair(x):
        x = _check_x(x)
        z = x * x
        m11 = kummer_m(-eta / 2.0, 0.5, z, scaled=True)
        m33 = kummer_m((1.0 - eta) / 2.0, 1.5, z, scaled=True)
        return A * x * m33, m11 - B * x * m33

    return pair


def _closed_pt(cfg: OscConfig, x, want_t: bool = True):
    x = _check_x(x)
    M = mij_eval(cfg.eta, x, with_a=want_t)
    A, B, C, D, eta = cfg.A, cfg.B, cfg.C_value, cfg.D, cfg.eta
    den = (M.M11 - B * x * M.M33) ** 2 + (A * x * M.M33) ** 2
    p = A * (M.M11 * M.M31 + 2.0 * eta * x * x * M.M33 * M.M53) / den
    if not want_t:
        return p, None
    bracket = M.M33 * M.M11_a - M.M11 * M.M33_a + C * M.M11 * M.M33 + D * x * M.M33**2
    t = TAU_N * (A * x / (4.0 * math.pi)) * bracket / den
    return p, t


def _unwrap_from_origin(pair, xs):
    out = np.empty_like(xs)
    order = np.argsort(xs, kind="stable")
    right = order[xs[order] >= 0.0]
    left = order[xs[order] < 0.0][::-1]
    for idx in (right, left):
        if idx.size:
            path = np.concatenate(([0.0], xs[idx]))
            out[idx] = unwrap_phase(pair, path, track=PhaseTrack(), max_step=_MAX_STEP)[1:]
    return out


def osc_dynamics_grid(cfg: OscConfig, xs):
    """(W, p, t) on a grid of mu x values; W in units of ħ, t in units of 1/ω_N."""
    xs = np.asarray(xs, dtype=float)
    W = _unwrap_from_origin(_pair(cfg), xs)
    p, t = _closed_pt(cfg, xs)
    return W, p, t


def osc_dynamics(cfg: OscConfig, mu_x: float, track: Optional[PhaseTrack] = None) -> DynamicsPoint:
    """Single-point (W, p, t); ``track`` continues the unwrapped phase from 0."""
    if track is None:
        track = PhaseTrack()
    path = [0.0, mu_x] if track.x is None else [mu_x]
    W = unwrap_phase(_pair(cfg), path, track=track, max_step=_MAX_STEP)[-1]
    p, t = _closed_pt(cfg, np.array([mu_x]))
    return DynamicsPoint(x=float(mu_x), W=float(W), p=float(p[0]), t=float(t[0]))


def osc_world_line(cfg: OscConfig):
    """Vectorized t(mu x) on the first half-cycle branch."""

    def t_of_x(x):
        return _closed_pt(cfg, np.asarray(x, dtype=float))[1]

    return t_of_x


def newtonian_osc_grid(eta: float, xs):
    """Newtonian (W_N, p_N, t_N) inside the turning points, natural units (W in ħ)."""
    xs = np.asarray(xs, dtype=float)
    X2 = 2.0 * eta + 1.0
    if np.any(xs * xs > X2 * (1.0 + 1e-14)):
        raise OutsideTurningPoints("|mu x| must not exceed sqrt(2 eta + 1) = %g" % math.sqrt(max(X2, 0.0)))
    rad = np.sqrt(np.maximum(X2 - xs * xs, 0.0))
    s = np.clip(xs / math.sqrt(X2), -1.0, 1.0)
    W = 0.5 * (xs * rad + X2 * np.arcsin(s))
    t = np.arcsin(s)
    return W, rad, t


def newtonian_osc(eta: float, mu_x: float) -> DynamicsPoint:
    W, p, t = newtonian_osc_grid(eta, np.array([mu_x]))
    return DynamicsPoint(x=float(mu_x), W=float(W[0]), p=float(p[0]), t=float(t[0]))


def _limit_sequence(cfg: OscConfig, x_start: Optional[float] = None):
    X = x_start if x_start is not None else cfg.turning_point + 3.0
    seq = []
    while X < X_MAX:
        seq.append(X)
        X *= math.sqrt(2.0)
    seq.append(X_MAX)
    return seq


def _settle(values, rtol, atol):
    """True once the last three values agree within tolerance."""
    if len(values) < 3:
        return False
    v = values[-3:]
    scale = max(abs(v[-1]), 1.0)
    return abs(v[-1] - v[-2]) <= rtol * scale + atol and abs(v[-2] - v[-3]) <= rtol * scale + atol


def _t_limit(cfg: OscConfig, sign: float, rtol: float) -> float:
    vals = []
    for X in _limit_sequence(cfg):
        vals.append(float(_closed_pt(cfg, np.array([sign * X]))[1][0]))
        if _settle(vals, rtol, 0.0):
            return vals[-1]
    raise NoConvergence("t(x) did not settle before |mu x| = %g (eta=%r, a=%r)" % (X_MAX, cfg.eta, cfg.a))


def osc_period(cfg: OscConfig, rtol: float = 1e-8) -> float:
    """Period τ = 2 [t(+inf) - t(-inf)] (= 4 t(inf) for the symmetric case), units of 1/ω_N."""
    t_hi = _t_limit(cfg, 1.0, rtol)
    t_lo = -t_hi if (cfg.B == 0.0 and cfg.D == 0.0) else _t_limit(cfg, -1.0, rtol)
    return 2.0 * (t_hi - t_lo)


def omega_ratio(cfg: OscConfig, rtol: float = 1e-8) -> float:
    """ω/ω_N = τ_N/τ."""
    return TAU_N / osc_period(cfg, rtol)


def _W_limit(cfg: OscConfig, sign: float, rtol: float, atol: float) -> float:
    pair = _pair(cfg)
    track = PhaseTrack()
    vals = []
    prev = 0.0
    unwrap_phase(pair, [0.0], track=track)
    for X in _limit_sequence(cfg):
        vals.append(float(unwrap_phase(pair, [sign * X], track=track, max_step=_MAX_STEP)[-1]))
        prev = X
        if _settle(vals, rtol, atol):
            return vals[-1]
    raise NoConvergence("W(x) did not settle before |mu x| = %g (eta=%r, a=%r)" % (prev, cfg.eta, cfg.a))


def full_cycle_action(cfg: OscConfig, rtol: float = 1e-10, atol: float = 1e-9) -> float:
    """J = 2 [W(+inf) - W(-inf)] in units of h.

    Taken from the unwrapped action rather than by integrating p, because
    near-delta momentum spikes at small ``a`` defeat quadrature while the
    phase count stays exact.
    """
    w_hi = _W_limit(cfg, 1.0, rtol, atol)
    w_lo = -w_hi if cfg.B == 0.0 else _W_limit(cfg, -1.0, rtol, atol)
    return 2.0 * (w_hi - w_lo) / (2.0 * math.pi)


def action_step_positions(cfg: OscConfig, x_max: Optional[float] = None) -> np.ndarray:
    """Positions where W/ħ crosses an odd multiple of π/2.

    For strong activation W is a staircase with steps of height h/2, and
    each step contains exactly one such crossing.  Because p > 0 the
    crossings are simple and their count equals J/h.
    """
    if x_max is None:
        x_max = min(X_MAX, cfg.turning_point + 8.0)
    xs = np.arange(0.0, x_max + _MAX_STEP, _MAX_STEP / 2.0)
    xs = xs[xs <= x_max]
    grid = np.concatenate((-xs[:0:-1], xs))
    W = _unwrap_from_origin(_pair(cfg), grid)
    levels = (W / math.pi) - 0.5
    k = np.floor(levels)
    idx = np.flatnonzero(np.diff(k) != 0)
    out = []
    for i in idx:
        lev = max(k[i], k[i + 1])
        frac = (lev - levels[i]) / (levels[i + 1] - levels[i])
        out.append(grid[i] + frac * (grid[i + 1] - grid[i]))
    return np.asarray(out)


# ---------------------------------------------------------------------------
# probability density
# ---------------------------------------------------------------------------


@dataclass
class DensityResult:
    x: np.ndarray
    density: np.ndarray
    total: float
    tail_fraction: float


def osc_density(cfg: OscConfig, xs, tail_tol: float = 1e-6) -> DensityResult:
    """P_x = |t'(x)| / ∫|t'| dx on the supplied grid.

    t' comes from the exact energy derivative of the momentum formula.  The
    normalization adds the tails beyond the grid, estimated from the
    converged limits t(±inf); the tail share must stay below ``tail_tol``.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size < 3 or np.any(np.diff(xs) <= 0):
        raise ValidationError("density grid must be strictly increasing with >= 3 points")
    ref = cfg.reference()
    tx = np.abs(time_slope_at(osc_basis(cfg.eta, xs, scaled=True), ref))
    inner = float(integrate.simpson(tx, x=xs))
    world = osc_world_line(cfg)
    t_hi = _t_limit(cfg, 1.0, 1e-12)
    t_lo = _t_limit(cfg, -1.0, 1e-12)
    tail = abs(t_hi - float(world(np.array([xs[-1]]))[0])) + abs(float(world(np.array([xs[0]]))[0]) - t_lo)
    total = inner + tail
    frac = tail / total
    if not np.isfinite(total) or total <= 0 or frac > tail_tol:
        raise NormalizationFailure("tail share %.3g exceeds %.3g; widen the grid" % (frac, tail_tol))
    return DensityResult(xs, tx / total, total, frac)


def newtonian_density(eta: float, xs) -> np.ndarray:
    """1/(π sqrt(X² - x²)) inside the turning points X = sqrt(2η+1), zero outside."""
    xs = np.asarray(xs, dtype=float)
    X2 = 2.0 * eta + 1.0
    inside = xs * xs < X2
    out = np.zeros_like(xs)
    out[inside] = 1.0 / (math.pi * np.sqrt(X2 - xs[inside] ** 2))
    return out


def ground_state_density(xs) -> np.ndarray:
    """Standard ground-state psi*psi = exp(-x²)/sqrt(pi)."""
    xs = np.asarray(xs, dtype=float)
    return np.exp(-xs * xs) / math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# quantization scans
# ---------------------------------------------------------------------------


@dataclass
class Step:
    eta: float
    size: float
    parity: str


@dataclass
class ScanResult:
    a: float
    eta: np.ndarray
    J: np.ndarray
    steps: List[Step] = field(default_factory=list)


def _parity(eta: float) -> str:
    if abs(eta + 0.5) < 0.1:
        return "zero-point"
    return "even" if int(round(eta)) % 2 == 0 else "odd"


def detect_steps(eta, J, factor: float = 10.0) -> List[Step]:
    """Locate quasi-discrete steps in J(η).

    Grid intervals whose increment exceeds ``factor`` times the median
    increment are flagged, and contiguous flagged intervals form one step.
    The step size is the plateau-to-plateau difference across the cluster
    and its location is where J crosses the midpoint between the plateaus.
    """
    eta = np.asarray(eta, dtype=float)
    J = np.asarray(J, dtype=float)
    dJ = np.diff(J)
    if dJ.size == 0:
        return []
    med = float(np.median(np.abs(dJ)))
    flagged = np.abs(dJ) > factor * med
    steps = []
    i = 0
    n = dJ.size
    while i < n:
        if not flagged[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and flagged[j + 1]:
            j += 1
        lo, hi = i, j + 1
        size = float(J[hi] - J[lo])
        mid = 0.5 * (J[lo] + J[hi])
        seg_e, seg_J = eta[lo:hi + 1], J[lo:hi + 1]
        k = int(np.argmax(np.abs(dJ[lo:hi]))) + lo
        loc = 0.5 * (eta[k] + eta[k + 1])
        for q in range(seg_J.size - 1):
            if (seg_J[q] - mid) * (seg_J[q + 1] - mid) <= 0 and seg_J[q + 1] != seg_J[q]:
                loc = float(seg_e[q] + (mid - seg_J[q]) / (seg_J[q + 1] - seg_J[q]) * (seg_e[q + 1] - seg_e[q]))
                break
        steps.append(Step(eta=loc, size=size, parity=_parity(loc)))
        i = j + 1
    return steps


def quantization_scan(a: float, eta_from: float, eta_to: float, steps: int, factor: float = 10.0) -> ScanResult:
    """J(η)/h on a uniform η grid plus the detected steps.

    J at η = -1/2 is taken as 0, its limit from above (A vanishes there).
    """
    if not (a > 0):
        raise ValidationError("a must be positive")
    if eta_from < -0.5 or eta_to <= eta_from or steps < 2:
        raise ValidationError("need -1/2 <= eta_from < eta_to and at least 2 steps")
    etas = np.linspace(eta_from, eta_to, int(steps))
    J = np.empty_like(etas)
    for i, e in enumerate(etas):
        J[i] = 0.0 if e <= -0.5 else full_cycle_action(OscConfig(eta=float(e), a=a))
    return ScanResult(a=a, eta=etas, J=J, steps=detect_steps(etas, J, factor))
