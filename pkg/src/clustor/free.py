"""Free clustor: V = 0, trigonometric basis, reference point x0 = 0.

The state is described by the dimensionless constants

    A = p0/(ħk),  B = px0/(2 k p0),  C = ħ²k² tx0/(m p0) - 1,
    D = ħ²k (p0 txx0 - 2 px0 tx0)/(2 m p0²),

with A = 1, B = C = D = 0 the quasi-Newtonian (unactivated) state.  All
functions return physical values in the units implied by ``m``, ``E`` and
``hbar``; the natural units are ħk for momentum, m/(ħk²) for time and h for
action.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .errors import NonConvergentUnwrap, QuadratureFailure, ValidationError
from .kinematics import BasisEval, DynamicsPoint, ReferenceData
from .specfun import PhaseTrack, unwrap_phase

__all__ = [
    "FreeConfig",
    "FreeActivation",
    "free_activation",
    "activation_from_constants",
    "free_basis",
    "free_dynamics",
    "free_dynamics_grid",
    "free_dynamics_alpha",
    "free_world_line",
    "average_momentum",
    "delta_limit_check",
    "delta_peak_positions",
]


@dataclass(frozen=True)
class FreeConfig:
    """Mass, energy and dimensionless activation constants of a free clustor."""

    m: float = 1.0
    E: float = 0.5
    A: float = 1.0
    B: float = 0.0
    C: float = 0.0
    D: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("m", "E", "hbar"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValidationError("%s must be a positive finite number, got %r" % (name, v))
        for name in ("A", "B", "C", "D"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError("%s must be finite" % name)
        if self.A == 0:
            raise ValidationError("A must be nonzero (p0 = A ħk cannot vanish)")

    @property
    def k(self) -> float:
        return math.sqrt(2.0 * self.m * self.E) / self.hbar

    @property
    def wavelength(self) -> float:
        return 2.0 * math.pi / self.k

    @property
    def dk_dE(self) -> float:
        return self.m / (self.hbar**2 * self.k)

    @property
    def momentum_unit(self) -> float:
        return self.hbar * self.k

    @property
    def time_unit(self) -> float:
        return self.m / (self.hbar * self.k**2)

    @property
    def h(self) -> float:
        return 2.0 * math.pi * self.hbar

    def reference(self) -> ReferenceData:
        """Reference constants (p0, px0, tx0, txx0) implied by A, B, C, D."""
        k, hb, m = self.k, self.hbar, self.m
        p0 = self.A * hb * k
        px0 = 2.0 * k * p0 * self.B
        tx0 = (self.C + 1.0) * m * p0 / (hb**2 * k**2)
        txx0 = (2.0 * m * p0**2 * self.D / (hb**2 * k) + 2.0 * px0 * tx0) / p0
        return ReferenceData(energy=self.E, x0=0.0, p0=p0, px0=px0, tx0=tx0, txx0=txx0)

    @classmethod
    def from_reference(cls, ref: ReferenceData, m: float, hbar: float = 1.0) -> "FreeConfig":
        k = math.sqrt(2.0 * m * ref.energy) / hbar
        A = ref.p0 / (hbar * k)
        B = ref.px0 / (2.0 * k * ref.p0)
        C = hbar**2 * k**2 * ref.tx0 / (m * ref.p0) - 1.0
        D = hbar**2 * k * (ref.p0 * ref.txx0 - 2.0 * ref.px0 * ref.tx0) / (2.0 * m * ref.p0**2)
        return cls(m=m, E=ref.energy, A=A, B=B, C=C, D=D, hbar=hbar)


@dataclass(frozen=True)
class FreeActivation:
    """Primary/secondary activation parameters and their phase angles."""

    alpha1: float
    phi1: float
    alpha2: float
    phi2: float

    def as_dict(self) -> dict:
        return {"alpha1": self.alpha1, "phi1": self.phi1, "alpha2": self.alpha2, "phi2": self.phi2}


def free_activation(cfg: FreeConfig) -> FreeActivation:
    """alpha1, phi1, alpha2, phi2 of a free clustor."""
    A, B, C, D = cfg.A, cfg.B, cfg.C, cfg.D
    s = 1.0 + A * A + B * B
    ratio = 2.0 * A / s
    alpha1 = math.sqrt(max(0.0, 1.0 - ratio * ratio))
    phi1 = 0.5 * math.atan2(2.0 * B, 1.0 - A * A - B * B)
    alpha2 = 0.5 * math.hypot(C, D)
    phi2 = 0.5 * math.atan2(C, D)
    return FreeActivation(alpha1, phi1, alpha2, phi2)


def activation_from_constants(a, b, c, d, da=None, db=None, dc=None, dd=None, k=None, dk_dE=None) -> FreeActivation:
    """Activation of a free-type wave segment psi_R + i psi_I.

    The segment is written with a local coordinate xi as
    psi_R = c cos(k xi) - d sin(k xi), psi_I = a cos(k xi) + b sin(k xi),
    so that a free clustor has (a, b, c, d) = (0, A, 1, B).  Energy
    derivatives of the four constants (``da`` .. ``dd``) give alpha2; they
    may be omitted when only alpha1 is wanted.
    """
    s = a * a + b * b + c * c + d * d
    w = a * d + b * c
    alpha1 = math.sqrt(max(0.0, 1.0 - (2.0 * w / s) ** 2))
    phi1 = 0.5 * math.atan2(2.0 * (c * d - a * b), c * c + a * a - b * b - d * d)
    if da is None:
        return FreeActivation(alpha1, phi1, float("nan"), float("nan"))
    q_c = c * da - a * dc
    q_s = c * db - d * da - b * dc + a * dd
    q_ss = b * dd - d * db
    kappa = k / (dk_dE * w)
    c_eff = kappa * q_s
    d_eff = -kappa * (q_c - q_ss)
    return FreeActivation(alpha1, phi1, 0.5 * math.hypot(c_eff, d_eff), 0.5 * math.atan2(c_eff, d_eff))


def free_basis(cfg: FreeConfig):
    """Return a vectorized function x -> BasisEval for psi1 = cos kx, psi2 = sin kx."""
    k, kp = cfg.k, cfg.dk_dE

    def basis(x):
        x = np.asarray(x, dtype=float)
        s, c = np.sin(k * x), np.cos(k * x)
        return BasisEval(
            psi1=c, psi2=s,
            psi1_x=-k * s, psi2_x=k * c,
            psi1_E=-x * kp * s, psi2_E=x * kp * c,
            psi1_xE=-kp * s - k * kp * x * c, psi2_xE=kp * c - k * kp * x * s,
            psi1_0=1.0, psi2_0=0.0, psi1_x0=0.0, psi2_x0=k,
            psi1_E0=0.0, psi2_E0=0.0, psi1_xE0=0.0, psi2_xE0=kp,
        )

    return basis


def _closed_pair(cfg: FreeConfig):
    k, A, B = cfg.k, cfg.A, cfg.B

    def pair(x):
        s, c = np.sin(k * x), np.cos(k * x)
        return A * s, c - B * s

    return pair


def _closed_pt(cfg: FreeConfig, x):
    k, A, B, C, D = cfg.k, cfg.A, cfg.B, cfg.C, cfg.D
    s, c = np.sin(k * x), np.cos(k * x)
    den = (c - B * s) ** 2 + (A * s) ** 2
    p = cfg.hbar * k * A / den
    t = cfg.time_unit * A * (k * x + C * s * c + D * s * s) / den
    return p, t


def free_dynamics_grid(cfg: FreeConfig, xs):
    """(W, p, t) arrays on a grid, W unwrapped outwards from x0 = 0."""
    xs = np.asarray(xs, dtype=float)
    W = _unwrap_from_origin(_closed_pair(cfg), xs, cfg.wavelength / 16.0) * cfg.hbar
    p, t = _closed_pt(cfg, xs)
    return W, p, t


def _unwrap_from_origin(pair, xs, max_step):
    out = np.empty_like(xs)
    order = np.argsort(xs, kind="stable")
    right = order[xs[order] >= 0.0]
    left = order[xs[order] < 0.0][::-1]
    for idx in (right, left):
        if idx.size:
            path = np.concatenate(([0.0], xs[idx]))
            out[idx] = unwrap_phase(pair, path, track=PhaseTrack(), max_step=max_step)[1:]
    return out


def free_dynamics(cfg: FreeConfig, x: float, track: Optional[PhaseTrack] = None) -> DynamicsPoint:
    """Single-point evaluation; ``track`` carries the unwrapped phase between calls."""
    if track is None:
        track = PhaseTrack()
    path = [0.0, x] if track.x is None else [x]
    ang = unwrap_phase(_closed_pair(cfg), path, track=track, max_step=cfg.wavelength / 16.0)[-1]
    p, t = _closed_pt(cfg, x)
    return DynamicsPoint(x=float(x), W=float(cfg.hbar * ang), p=float(p), t=float(t))


def free_dynamics_alpha(cfg: FreeConfig, xs):
    """(W, p, t) from the activation-parameter form of the closed expressions.

    The action ratio is multiplied through by cos(kx + phi1) cos(phi1) so
    that the pair stays finite where the tangents diverge; this leaves the
    ratio, and hence the cumulative arctangent, unchanged.
    """
    act = free_activation(cfg)
    a1, f1, a2, f2 = act.alpha1, act.phi1, act.alpha2, act.phi2
    k = cfg.k
    sign = math.copysign(1.0, cfg.A)
    root = sign * math.sqrt(max(0.0, 1.0 - a1 * a1))

    def pair(x):
        u = k * x + f1
        num = root * np.sin(k * x)
        den = (1.0 + a1) * np.cos(u) * math.cos(f1) + (1.0 - a1) * math.sin(f1) * np.sin(u)
        return num, den

    xs = np.asarray(xs, dtype=float)
    W = cfg.hbar * _unwrap_from_origin(pair, xs, cfg.wavelength / 16.0)
    kern = root / (1.0 + a1 * np.cos(2.0 * (k * xs + f1)))
    p = cfg.hbar * k * kern
    t = cfg.time_unit * kern * (k * xs - a2 * (np.cos(2.0 * (k * xs + f2)) - math.cos(2.0 * f2)))
    return W, p, t


def free_world_line(cfg: FreeConfig):
    """Vectorized t(x) of the free clustor (for clustor-point extraction)."""

    def t_of_x(x):
        return _closed_pt(cfg, np.asarray(x, dtype=float))[1]

    return t_of_x


def delta_peak_positions(cfg: FreeConfig, n) -> np.ndarray:
    """Positions where the momentum kernel peaks: k x + phi1 = (n + 1/2) pi."""
    phi1 = free_activation(cfg).phi1
    n = np.asarray(n, dtype=float)
    return ((n + 0.5) * math.pi - phi1) / cfg.k


def average_momentum(cfg: FreeConfig, x_start: float = 0.0, rtol: float = 1e-12) -> float:
    """Mean of p(x) over one spatial period lambda/2.

    Adaptive quadrature is split at the kernel peaks.  When its error
    estimate misses ``rtol`` (near-delta activation) the mean is taken from
    the exact action step instead: (W(x+lambda/2) - W(x)) / (lambda/2).
    """
    half = cfg.wavelength / 2.0
    a, b = x_start, x_start + half
    n = np.arange(math.floor(cfg.k * a / math.pi) - 1, math.ceil(cfg.k * b / math.pi) + 2)
    peaks = delta_peak_positions(cfg, n)
    peaks = peaks[(peaks > a) & (peaks < b)]

    def p_of_x(x):
        return float(_closed_pt(cfg, np.array(x))[0])

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(p_of_x, a, b, points=list(peaks) or None, limit=400, epsabs=0.0, epsrel=rtol)
    mean = val / half
    if np.isfinite(mean) and err <= 10.0 * rtol * abs(val):
        return float(mean)
    try:
        W, _, _ = free_dynamics_grid(cfg, np.array([a, b]))
    except NonConvergentUnwrap as exc:
        raise QuadratureFailure("both quadrature and action-step fallback failed") from exc
    return float((W[1] - W[0]) / half)


def delta_limit_check(alpha1: float, phi1: float = 0.0) -> float:
    """Area of the kernel sqrt(1-a^2)/(1 + a cos 2(u + phi1)) over one period in u.

    The half-angle substitution w = tan(theta/2), theta = 2(u + phi1), sends
    the sharp peak (theta = pi) to w = +-inf and turns the integrand into the
    broad Lorentzian sqrt(1-a^2) / ((1+a) + (1-a) w^2).  The integral equals
    pi for every alpha1 < 1, so each emerging delta function carries the same
    weight.  Because the integrand is periodic, phi1 only shifts where the
    period starts.
    """
    if not (0.0 <= alpha1 < 1.0):
        raise ValidationError("alpha1 must lie in [0, 1)")
    root = math.sqrt(1.0 - alpha1 * alpha1)

    # cos(theta) = (1-w^2)/(1+w^2) and du = dtheta/2 = dw/(1+w^2)
    def g(w):
        return root / ((1.0 + w * w) + alpha1 * (1.0 - w * w))

    with warnings.catch_warnings():
        # the tolerance sits at the rounding floor; quad flags that harmlessly
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        left, _ = integrate.quad(g, -np.inf, 0.0, epsabs=0.0, epsrel=1e-13, limit=200)
        right, _ = integrate.quad(g, 0.0, np.inf, epsabs=0.0, epsrel=1e-13, limit=200)
    return left + right
