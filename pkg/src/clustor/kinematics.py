"""System-agnostic closed forms for the action, momentum and world-line.

A one-degree-of-freedom clustor state is fixed by two independent real
solutions psi1, psi2 of the stationary Schrodinger equation (the *basis*) and
six reference constants (E, x0, p0, px0, tx0, txx0).  The functions below
evaluate

* W(x): ħ times the cumulative arctangent of a basis bilinear ratio,
* p(x) = dW/dx,
* t(x): the world-line, i.e. dW/dE with the time origin at x0,

plus the diagnostics (energy equation, equations of motion, probability
current identity) used to validate every concrete system.

All formulas are homogeneous in the basis values at x, so a basis may supply
values multiplied by any common positive factor per point (the oscillator
uses this to stay inside the floating-point range).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import (
    BranchCrossing,
    DegenerateDenominator,
    GridTooCoarse,
    NonzeroPotentialAtReference,
    ValidationError,
)
from .specfun import PhaseTrack, unwrap_phase

__all__ = [
    "ReferenceData",
    "BasisEval",
    "DynamicsPoint",
    "phase_pair",
    "action_at",
    "action_grid",
    "momentum_at",
    "time_at",
    "time_slope_at",
    "velocity_at",
    "assemble_wavefunction",
    "current_momentum",
    "quasi_newtonian_ref",
    "initial_values",
    "energy_residual",
    "third_order_residual",
    "motion_residual",
    "invert_branch",
]

_DEGENERATE = 1e-300


@dataclass(frozen=True)
class ReferenceData:
    """The six constants that, with a basis, define a clustor state."""

    energy: float
    x0: float
    p0: float
    px0: float
    tx0: float
    txx0: float

    def __post_init__(self):
        if self.p0 == 0:
            raise ValidationError("p0 must be nonzero (a clustor never has zero momentum)")
        if self.tx0 == 0:
            raise ValidationError("tx0 must be nonzero")


@dataclass
class BasisEval:
    """Basis values at one or more points plus the eight reference constants.

    Per-point fields may be scalars or equal-length arrays.  ``*_E`` are
    energy derivatives, ``*_xE`` mixed derivatives; the ``*0`` fields are
    the same quantities at the reference point x0.
    """

    psi1: np.ndarray
    psi2: np.ndarray
    psi1_x: np.ndarray
    psi2_x: np.ndarray
    psi1_E: np.ndarray
    psi2_E: np.ndarray
    psi1_xE: np.ndarray
    psi2_xE: np.ndarray
    psi1_0: float
    psi2_0: float
    psi1_x0: float
    psi2_x0: float
    psi1_E0: float = 0.0
    psi2_E0: float = 0.0
    psi1_xE0: float = 0.0
    psi2_xE0: float = 0.0

    def reference_wronskian(self) -> float:
        return self.psi1_0 * self.psi2_x0 - self.psi2_0 * self.psi1_x0

    def swapped(self) -> "BasisEval":
        """Same basis with the roles of psi1 and psi2 exchanged."""
        return BasisEval(
            self.psi2, self.psi1, self.psi2_x, self.psi1_x,
            self.psi2_E, self.psi1_E, self.psi2_xE, self.psi1_xE,
            self.psi2_0, self.psi1_0, self.psi2_x0, self.psi1_x0,
            self.psi2_E0, self.psi1_E0, self.psi2_xE0, self.psi1_xE0,
        )

    def scaled(self, c: float) -> "BasisEval":
        """Both basis functions multiplied by the constant ``c``."""
        kw = {name: getattr(self, name) * c for name in self.__dataclass_fields__}
        return BasisEval(**kw)


@dataclass
class DynamicsPoint:
    """(x, W, p, t) at one position, with per-field validity flags."""

    x: float
    W: float
    p: float
    t: float
    valid: dict = field(default_factory=lambda: {"W": True, "p": True, "t": True})


def _check_basis(basis: BasisEval):
    if basis.reference_wronskian() == 0:
        raise ValidationError("basis functions are linearly dependent at the reference point")


def phase_pair(basis: BasisEval, ref: ReferenceData, hbar: float = 1.0):
    """Numerator and denominator whose cumulative arctangent gives W/ħ."""
    b, p0, px0 = basis, ref.p0, ref.px0
    num = 2.0 * p0**2 * (b.psi1_0 * b.psi2 - b.psi2_0 * b.psi1)
    den = hbar * (
        2.0 * p0 * (b.psi2_x0 * b.psi1 - b.psi1_x0 * b.psi2)
        + px0 * (b.psi2_0 * b.psi1 - b.psi1_0 * b.psi2)
    )
    return num, den


def action_grid(
    basis_fn: Callable[[np.ndarray], BasisEval],
    ref: ReferenceData,
    xs,
    *,
    hbar: float = 1.0,
    max_step: Optional[float] = None,
    track: Optional[PhaseTrack] = None,
) -> np.ndarray:
    """W on a grid ordered along a monotone path.

    A fresh ``track`` starts at x0, so W(x0) = 0.  Grids that straddle x0 are
    split and unwrapped outwards in both directions.
    """
    xs = np.asarray(xs, dtype=float)

    def pair(x):
        return phase_pair(basis_fn(x), ref, hbar)

    if track is not None and track.x is not None:
        return hbar * unwrap_phase(pair, xs, track=track, max_step=max_step)

    out = np.empty_like(xs)
    order = np.argsort(xs, kind="stable")
    right = order[xs[order] >= ref.x0]
    left = order[xs[order] < ref.x0][::-1]
    for idx in (right, left):
        if idx.size:
            tr = PhaseTrack()
            path = np.concatenate(([ref.x0], xs[idx]))
            out[idx] = hbar * unwrap_phase(pair, path, track=tr, max_step=max_step)[1:]
    if track is not None and xs.size:
        track.x = float(xs[-1])
        track.last_angle = float(out[-1] / hbar)
        num, den = pair(np.array([xs[-1]]))
        track.principal = float(np.arctan(num[0] / den[0])) if den[0] != 0 else math.pi / 2
    return out


def action_at(
    basis_fn: Callable[[np.ndarray], BasisEval],
    ref: ReferenceData,
    x: float,
    track: Optional[PhaseTrack] = None,
    *,
    hbar: float = 1.0,
    max_step: Optional[float] = None,
) -> float:
    """W(x) continued along the path recorded in ``track`` (fresh: from x0).

    ``basis_fn`` must be callable on arrays because the unwrapping refines
    the path adaptively.
    """
    if track is None:
        track = PhaseTrack()
    if track.x is None:
        if max_step is None:
            max_step = abs(x - ref.x0) / 64 or None
        return float(action_grid(basis_fn, ref, [x], hbar=hbar, max_step=max_step, track=track)[0])
    if max_step is None:
        max_step = abs(x - track.x) / 64 or None

    def pair(xx):
        return phase_pair(basis_fn(xx), ref, hbar)

    return hbar * float(unwrap_phase(pair, [x], track=track, max_step=max_step)[0])


def _pieces(b: BasisEval, p0, px0, hbar):
    wr0 = b.psi1_0 * b.psi2_x0 - b.psi2_0 * b.psi1_x0
    wr = b.psi1 * b.psi2_x - b.psi2 * b.psi1_x
    d1 = (px0 * b.psi2_0 + 2.0 * p0 * b.psi2_x0) * b.psi1 - (px0 * b.psi1_0 + 2.0 * p0 * b.psi1_x0) * b.psi2
    d2 = (2.0 * p0**2 / hbar) * (b.psi2_0 * b.psi1 - b.psi1_0 * b.psi2)
    return wr0, wr, d1, d2


def _check_den(d1, d2):
    s1 = np.abs(d1) ** 2
    s2 = np.abs(d2) ** 2
    if np.any((s1 < _DEGENERATE) & (s2 < _DEGENERATE)):
        raise DegenerateDenominator("both squared denominator terms underflow")


def _momentum_raw(b: BasisEval, p0, px0, hbar):
    wr0, wr, d1, d2 = _pieces(b, p0, px0, hbar)
    return 4.0 * p0**3 * wr0 * wr / (d1 * d1 + d2 * d2)


def momentum_at(basis: BasisEval, ref: ReferenceData, hbar: float = 1.0):
    """p(x) from the basis bilinears; equals p0 at x0."""
    _check_basis(basis)
    _, _, d1, d2 = _pieces(basis, ref.p0, ref.px0, hbar)
    _check_den(d1, d2)
    return _momentum_raw(basis, ref.p0, ref.px0, hbar)


def time_at(basis: BasisEval, ref: ReferenceData, hbar: float = 1.0):
    """World-line t(x) with t(x0) = 0.

    The middle bracket of the numerator carries single p0 factors (unlike the
    2p0 factors of the momentum denominator).  That transcription reproduces
    the closed free-particle world-line to rounding error, whereas the 2p0
    variant does not.
    """
    b, p0, px0, tx0, txx0 = basis, ref.p0, ref.px0, ref.tx0, ref.txx0
    _check_basis(b)
    _, _, d1, d2 = _pieces(b, p0, px0, hbar)
    _check_den(d1, d2)
    return _time_raw(b, p0, px0, tx0, txx0, d1, d2)


def _time_raw(b: BasisEval, p0, px0, tx0, txx0, d1, d2):
    s12 = b.psi2_0 * b.psi1 - b.psi1_0 * b.psi2
    inner = (
        (b.psi2_x0 * b.psi1_0 - b.psi1_x0 * b.psi2_0) * (b.psi2_E * b.psi1 - b.psi1_E * b.psi2)
        - (b.psi2_x0 * b.psi1 - b.psi1_x0 * b.psi2) * (b.psi2_E0 * b.psi1 - b.psi1_E0 * b.psi2)
        + s12 * (b.psi2_xE0 * b.psi1 - b.psi1_xE0 * b.psi2)
    )
    mixed = (px0 * b.psi2_0 + p0 * b.psi2_x0) * b.psi1 - (px0 * b.psi1_0 + p0 * b.psi1_x0) * b.psi2
    num = 2.0 * p0 * (2.0 * p0**2 * inner - 2.0 * tx0 * s12 * mixed + p0 * txx0 * s12**2)
    return num / (d1 * d1 + d2 * d2)


def _complexified(b: BasisEval, h: float) -> BasisEval:
    j = 1j * h
    return BasisEval(
        b.psi1 + j * b.psi1_E, b.psi2 + j * b.psi2_E,
        b.psi1_x + j * b.psi1_xE, b.psi2_x + j * b.psi2_xE,
        0.0, 0.0, 0.0, 0.0,
        b.psi1_0 + j * b.psi1_E0, b.psi2_0 + j * b.psi2_E0,
        b.psi1_x0 + j * b.psi1_xE0, b.psi2_x0 + j * b.psi2_xE0,
    )


def time_slope_at(basis: BasisEval, ref: ReferenceData, hbar: float = 1.0):
    """t_x(x) = dp/dE, by complex-step differentiation of the momentum formula.

    The energy enters p through the basis (``*_E`` fields) and through
    p0(E), px0(E), whose E-derivatives are tx0 and txx0.  The complex step
    involves no subtraction, so the result is accurate to rounding error.
    """
    _check_basis(basis)
    h = 1e-20
    cb = _complexified(basis, h)
    p = _momentum_raw(cb, ref.p0 + 1j * h * ref.tx0, ref.px0 + 1j * h * ref.txx0, hbar)
    return np.imag(p) / h


def velocity_at(basis: BasisEval, ref: ReferenceData, hbar: float = 1.0, threshold: float = 1e-12):
    """Clustor-point velocity 1/t_x.

    Where |t_x| falls below ``threshold * |tx0|`` the velocity is reported as
    a signed infinity instead of failing; this happens near the escape points
    of the oscillator world-line.
    """
    tx = np.asarray(time_slope_at(basis, ref, hbar), dtype=float)
    small = np.abs(tx) < threshold * abs(ref.tx0)
    with np.errstate(divide="ignore"):
        v = np.where(small, np.copysign(np.inf, tx), 1.0 / np.where(small, 1.0, tx))
    return float(v) if v.ndim == 0 else v


def assemble_wavefunction(basis: BasisEval, ref: ReferenceData, hbar: float = 1.0):
    """Real and imaginary parts of psi (arbitrary constant set to 1) and their x-derivatives."""
    b, p0, px0 = basis, ref.p0, ref.px0
    c1r = hbar * (2.0 * p0 * b.psi2_x0 + px0 * b.psi2_0)
    c2r = hbar * (2.0 * p0 * b.psi1_x0 + px0 * b.psi1_0)
    c1i = -2.0 * p0**2 * b.psi2_0
    c2i = -2.0 * p0**2 * b.psi1_0
    re = c1r * b.psi1 - c2r * b.psi2
    im = c1i * b.psi1 - c2i * b.psi2
    re_x = c1r * b.psi1_x - c2r * b.psi2_x
    im_x = c1i * b.psi1_x - c2i * b.psi2_x
    return re, im, re_x, im_x


def current_momentum(basis: BasisEval, ref: ReferenceData, hbar: float = 1.0):
    """m j / rho computed from the assembled wave function."""
    re, im, re_x, im_x = assemble_wavefunction(basis, ref, hbar)
    return hbar * (re * im_x - im * re_x) / (re * re + im * im)


def quasi_newtonian_ref(V0: float, V0_prime: float, m: float, E: float, x0: float = 0.0) -> ReferenceData:
    """Reference constants equal to the Newtonian values at a point where V = 0."""
    if V0 != 0:
        raise NonzeroPotentialAtReference("quasi-Newtonian values need V(x0) = 0, got %r" % (V0,))
    if not (E > 0 and m > 0):
        raise ValidationError("m and E must be positive")
    return ReferenceData(
        energy=E,
        x0=x0,
        p0=math.sqrt(2.0 * m * E),
        px0=-math.sqrt(m / (2.0 * E)) * V0_prime,
        tx0=math.sqrt(m / (2.0 * E)),
        txx0=math.sqrt(m / (8.0 * E**3)) * V0_prime,
    )


def initial_values(ref: ReferenceData, m: float, V0: float = 0.0, hbar: float = 1.0):
    """Time derivatives (x', x'', p', p'') at the reference point.

    These are the four non-Newtonian initial values of the third-order
    equations of motion, expressed through the Hamilton-Jacobi data.
    """
    p0, px0, tx0, txx0 = ref.p0, ref.px0, ref.tx0, ref.txx0
    q = (hbar / 2.0) ** 2
    xdot = 1.0 / tx0
    xddot = -txx0 / tx0**3
    pdot = px0 / tx0
    pddot = (
        p0**2 * tx0 * (2.0 * m * (ref.energy - V0) - p0**2)
        + q * px0 * (3.0 * px0 * tx0 - 2.0 * p0 * txx0)
    ) / (2.0 * q * p0 * tx0**3)
    return xdot, xddot, pdot, pddot


def _uniform_step(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 15:
        raise GridTooCoarse("need at least 15 grid points")
    d = np.diff(grid)
    if np.any(d <= 0):
        raise ValidationError("grid must be strictly increasing")
    return grid, d


def _deriv(f, x):
    """First derivative: fourth-order central stencil on uniform grids.

    The two points at each end (and every point of a non-uniform grid) use
    second-order ``np.gradient``; callers discard a few points per
    application at the ends.
    """
    out = np.gradient(f, x, edge_order=2)
    d = np.diff(x)
    if x.size >= 5 and np.allclose(d, d[0], rtol=1e-9, atol=0.0):
        out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * d[0])
    return out


def _energy_terms(x, p, V, m, hbar):
    p_x = _deriv(p, x)
    p_xx = _deriv(p_x, x)
    quantum = (hbar / 2.0) ** 2 * (2.0 * p * p_xx - 3.0 * p_x**2) / p**4
    return p**2 / (2.0 * m) * (1.0 + quantum) + V


def energy_residual(x_grid, p_values, V_fn, m: float, ref: ReferenceData, hbar: float = 1.0) -> float:
    """Largest |T + V - E| over interior grid points.

    T includes the quantum term built from finite-difference p_x and p_xx.
    The grid is checked by a halving test: the residual computed on every
    second point must not be dramatically smaller than on the full grid,
    which would signal unresolved oscillations in p.
    """
    x, _ = _uniform_step(x_grid)
    p = np.asarray(p_values, dtype=float)
    V = np.asarray(V_fn(x), dtype=float) * np.ones_like(x)
    e_full = _energy_terms(x, p, V, m, hbar)[4:-4]
    res = float(np.max(np.abs(e_full - ref.energy)))
    if x.size >= 11:
        e_half = _energy_terms(x[::2], p[::2], V[::2], m, hbar)[4:-4]
        res_half = float(np.max(np.abs(e_half - ref.energy)))
        if not np.isfinite(res_half) or res_half > 1e3 * max(res, 1e-12 * abs(ref.energy)) + 1.0 * abs(ref.energy):
            raise GridTooCoarse("energy residual unstable under grid halving")
    return res


def third_order_residual(x_grid, W_values, V_fn, m: float, E: float, hbar: float = 1.0) -> float:
    """Residual of the third-order equation for W, relative to (2mE)^2.

    With W' = p the equation reads
    p^2 (p^2 - 2m(E - V)) + (ħ/2)^2 (2 p p'' - 3 p'^2) = 0.
    """
    x, _ = _uniform_step(x_grid)
    W = np.asarray(W_values, dtype=float)
    p = _deriv(W, x)
    p_x = _deriv(p, x)
    p_xx = _deriv(p_x, x)
    V = np.asarray(V_fn(x), dtype=float) * np.ones_like(x)
    r = p**2 * (p**2 - 2.0 * m * (E - V)) + (hbar / 2.0) ** 2 * (2.0 * p * p_xx - 3.0 * p_x**2)
    return float(np.max(np.abs(r[6:-6]))) / (2.0 * m * E) ** 2


def motion_residual(t_grid, x_values, p_values, m: float, dV_fn, hbar: float = 1.0):
    """Relative residuals of the two generalized equations of motion.

    ``x_values`` and ``p_values`` sample x(t), p(t) on a uniform, increasing
    ``t_grid`` of a single monotone branch.  Time derivatives up to third
    order come from repeated central differences; a few points at each end
    are discarded.

    Returns ``(r1, r2)``: the first equation's residual scaled by max|m x'|,
    the second's scaled by the largest of its individual terms.
    """
    t, dt = _uniform_step(t_grid)
    x = np.asarray(x_values, dtype=float)
    p = np.asarray(p_values, dtype=float)
    if np.any(np.diff(x) == 0) or (np.any(np.diff(x) > 0) and np.any(np.diff(x) < 0)):
        raise BranchCrossing("x(t) is not monotone on the window")

    def d(f):
        return _deriv(f, t)

    xd, pd = d(x), d(p)
    xdd, pdd = d(xd), d(pd)
    xddd, pddd = d(xdd), d(pdd)
    q = (hbar / 2.0) ** 2
    lhs1 = p + q * (p * xd * (4.0 * pd * xdd - xd * pdd) + 3.0 * (p**2 * xdd**2 + pd**2 * xd**2) - p**2 * xd * xddd) / (p**3 * xd**4)
    rhs1 = m * xd
    quantum2 = q * (p * xd * pddd - 3.0 * pdd * (p * xdd + pd * xd)) / (m * p**2 * xd**4)
    force = -np.asarray(dV_fn(x), dtype=float) * np.ones_like(x)
    sl = slice(6, -6)
    r1 = np.max(np.abs(lhs1 - rhs1)[sl]) / np.max(np.abs(rhs1[sl]))
    scale2 = max(np.max(np.abs(pd[sl])), np.max(np.abs(quantum2[sl])), np.max(np.abs(force[sl])))
    r2 = np.max(np.abs(pd + quantum2 - force)[sl]) / scale2 if scale2 > 0 else 0.0
    return float(r1), float(r2)


def invert_branch(t_fn: Callable, x_lo: float, x_hi: float, t_values, xtol: float = 1e-14):
    """Solve t(x) = t_k on a monotone branch [x_lo, x_hi] for each requested time."""
    t_lo, t_hi = float(t_fn(x_lo)), float(t_fn(x_hi))
    lo, hi = min(t_lo, t_hi), max(t_lo, t_hi)
    out = []
    for tk in np.asarray(t_values, dtype=float):
        if not (lo <= tk <= hi):
            raise BranchCrossing("time %r outside the branch range [%r, %r]" % (tk, lo, hi))
        out.append(brentq(lambda x: float(t_fn(x)) - tk, x_lo, x_hi, xtol=xtol, rtol=4 * np.finfo(float).eps))
    return np.asarray(out)
