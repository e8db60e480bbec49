"""Free clustor incident on a rectangular barrier (V > 0) or well (V < 0).

Regions: 1 is x < x1 (reference point x0 inside it), 2 is x1 <= x <= x2
where the potential equals V, 3 is x > x2.  The wave function psi_R + i psi_I
is propagated as real functions.  In each region the four constants are the
values (psi_I, psi_I'/k, psi_R, -psi_R'/k) at the start of the region, so
that in the free regions

    psi_R = c cos(k xi) - d sin(k xi),   psi_I = a cos(k xi) + b sin(k xi)

with xi measured from the region start, and region 1 has (0, A, 1, B).
Inside the barrier the trigonometric functions are replaced by
ch(xi) = cosh(r k xi) and sh_r(xi) = sinh(r k xi)/r with r² = V/E - 1; for
E > V these are evaluated as cos(|r| k xi) and sin(|r| k xi)/|r|.  The
printed constants of the three-region table differ from these only by
powers of the wave-number ratio r, which cancel in every ratio that enters
W and the activation parameters, so nothing here needs complex arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ValidationError
from .free import FreeActivation, FreeConfig, activation_from_constants
from .specfun import PhaseTrack, unwrap_phase

__all__ = [
    "BarrierConfig",
    "RegionConstants",
    "region_constants",
    "barrier_wave",
    "barrier_action",
    "barrier_action_grid",
    "barrier_momentum",
    "region1_activation",
    "region3_activation",
]

_TAYLOR = 1e-6


@dataclass(frozen=True)
class BarrierConfig:
    """Barrier geometry, energy and incident activation (A, B, C, D)."""

    m: float = 1.0
    E: float = 0.5
    V: float = 0.0
    x1: float = 1.0
    x2: float = 2.0
    x0: float = 0.0
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
        for name in ("V", "x0", "x1", "x2", "A", "B", "C", "D"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError("%s must be finite" % name)
        if not (self.x0 < self.x1 <= self.x2):
            raise ValidationError("need x0 < x1 <= x2, got x0=%r x1=%r x2=%r" % (self.x0, self.x1, self.x2))
        if self.A == 0:
            raise ValidationError("A must be nonzero")

    @property
    def k(self) -> float:
        return math.sqrt(2.0 * self.m * self.E) / self.hbar

    @property
    def wavelength(self) -> float:
        return 2.0 * math.pi / self.k

    @property
    def r2(self) -> float:
        """Squared wave-number ratio r² = V/E - 1 (negative above the barrier)."""
        return self.V / self.E - 1.0

    def incident(self) -> FreeConfig:
        return FreeConfig(m=self.m, E=self.E, A=self.A, B=self.B, C=self.C, D=self.D, hbar=self.hbar)

    @classmethod
    def in_wavelengths(cls, V_over_E: float, x1: float, x2: float, **kw) -> "BarrierConfig":
        """Config with boundary positions given in units of the incident wavelength."""
        m, E, hbar = kw.pop("m", 1.0), kw.pop("E", 0.5), kw.pop("hbar", 1.0)
        lam = 2.0 * math.pi * hbar / math.sqrt(2.0 * m * E)
        return cls(m=m, E=E, V=V_over_E * E, x1=x1 * lam, x2=x2 * lam, hbar=hbar, **kw)


@dataclass(frozen=True)
class RegionConstants:
    """Twelve real constants, four per region (see module docstring)."""

    a1: float
    b1: float
    c1: float
    d1: float
    a2: float
    b2: float
    c2: float
    d2: float
    a3: float
    b3: float
    c3: float
    d3: float

    def region(self, n: int):
        return {1: (self.a1, self.b1, self.c1, self.d1),
                2: (self.a2, self.b2, self.c2, self.d2),
                3: (self.a3, self.b3, self.c3, self.d3)}[n]

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _ch_shr(r2: float, u):
    """cosh(r u), sinh(r u)/r and r² sinh(r u)/r as real functions of r²."""
    u = np.asarray(u, dtype=float)
    if abs(r2) * float(np.max(np.abs(u), initial=0.0)) ** 2 < _TAYLOR**2:
        q = r2 * u * u
        ch = 1.0 + q / 2.0 + q * q / 24.0
        sh = u * (1.0 + q / 6.0 + q * q / 120.0)
    elif r2 > 0:
        r = math.sqrt(r2)
        ch = np.cosh(r * u)
        sh = np.sinh(r * u) / r
    else:
        s = math.sqrt(-r2)
        ch = np.cos(s * u)
        sh = np.sin(s * u) / s
    return ch, sh


def _constants(E, A, B, cfg: BarrierConfig) -> RegionConstants:
    k = math.sqrt(2.0 * cfg.m * E) / cfg.hbar
    r2 = cfg.V / E - 1.0
    a1, b1, c1, d1 = 0.0, A, 1.0, B
    th = k * (cfg.x1 - cfg.x0)
    cs, sn = math.cos(th), math.sin(th)
    a2 = a1 * cs + b1 * sn
    b2 = b1 * cs - a1 * sn
    c2 = c1 * cs - d1 * sn
    d2 = d1 * cs + c1 * sn
    ch, sh = _ch_shr(r2, k * (cfg.x2 - cfg.x1))
    ch, sh = float(ch), float(sh)
    a3 = a2 * ch + b2 * sh
    b3 = b2 * ch + r2 * a2 * sh
    c3 = c2 * ch - d2 * sh
    d3 = d2 * ch - r2 * c2 * sh
    return RegionConstants(a1, b1, c1, d1, a2, b2, c2, d2, a3, b3, c3, d3)


def region_constants(cfg: BarrierConfig) -> RegionConstants:
    """The twelve matching constants of ``cfg``."""
    return _constants(cfg.E, cfg.A, cfg.B, cfg)


def _incident_derivatives(cfg: BarrierConfig):
    """dA/dE and dB/dE implied by the incident C and D."""
    k = cfg.k
    kp = cfg.m / (cfg.hbar**2 * k)
    dA = cfg.C * kp * cfg.A / k
    dB = cfg.D * kp / k + cfg.B * dA / cfg.A
    return dA, dB


def barrier_wave(cfg: BarrierConfig, x, rc: Optional[RegionConstants] = None, region=None):
    """psi_R, psi_I and their x-derivatives at ``x``.

    ``region`` forces a particular region's formula (used for two-sided
    continuity checks); by default each point uses the region containing it.
    """
    x = np.asarray(x, dtype=float)
    rc = rc or region_constants(cfg)
    k, r2 = cfg.k, cfg.r2
    out = [np.zeros_like(x) for _ in range(4)]
    if region is None:
        sel = {1: x < cfg.x1, 2: (x >= cfg.x1) & (x <= cfg.x2), 3: x > cfg.x2}
    else:
        sel = {n: np.full(x.shape, n == region) for n in (1, 2, 3)}
    starts = {1: cfg.x0, 2: cfg.x1, 3: cfg.x2}
    for n in (1, 2, 3):
        m = sel[n]
        if not np.any(m):
            continue
        a, b, c, d = rc.region(n)
        u = k * (x[m] - starts[n])
        if n == 2:
            cc, ss = _ch_shr(r2, u)
            dcc, dss = r2 * ss, cc  # derivatives / k of ch and sh_r
        else:
            cc, ss = np.cos(u), np.sin(u)
            dcc, dss = -ss, cc
        out[0][m] = c * cc - d * ss
        out[1][m] = a * cc + b * ss
        out[2][m] = k * (c * dcc - d * dss)
        out[3][m] = k * (a * dcc + b * dss)
    return tuple(out)


def _pair_fn(cfg: BarrierConfig, rc: RegionConstants):
    def pair(x):
        re, im, _, _ = barrier_wave(cfg, x, rc)
        return im, re

    return pair


def _max_step(cfg: BarrierConfig) -> float:
    step = cfg.wavelength / 16.0
    if cfg.r2 < 0:
        step = min(step, cfg.wavelength / (16.0 * math.sqrt(-cfg.r2)))
    return step


def barrier_action_grid(cfg: BarrierConfig, xs) -> np.ndarray:
    """W on a grid, unwrapped outwards from x0 and continuous at x1, x2."""
    xs = np.asarray(xs, dtype=float)
    rc = region_constants(cfg)
    pair = _pair_fn(cfg, rc)
    out = np.empty_like(xs)
    order = np.argsort(xs, kind="stable")
    right = order[xs[order] >= cfg.x0]
    left = order[xs[order] < cfg.x0][::-1]
    for idx in (right, left):
        if idx.size:
            path = np.concatenate(([cfg.x0], xs[idx]))
            out[idx] = unwrap_phase(pair, path, track=PhaseTrack(), max_step=_max_step(cfg))[1:]
    return cfg.hbar * out


def barrier_action(cfg: BarrierConfig, x: float, track: Optional[PhaseTrack] = None) -> float:
    """W(x), continued from x0 (fresh track) or from the track's last point."""
    if track is None:
        track = PhaseTrack()
    rc = region_constants(cfg)
    path = [cfg.x0, x] if track.x is None else [x]
    return cfg.hbar * float(unwrap_phase(_pair_fn(cfg, rc), path, track=track, max_step=_max_step(cfg))[-1])


def barrier_momentum(cfg: BarrierConfig, x):
    """p = ħ (psi_R psi_I' - psi_I psi_R') / (psi_R² + psi_I²) in every region."""
    re, im, re_x, im_x = barrier_wave(cfg, x)
    return cfg.hbar * (re * im_x - im * re_x) / (re * re + im * im)


def _activation(cfg: BarrierConfig, n: int, rel_step: float = 1e-6) -> FreeActivation:
    rc = region_constants(cfg)
    dA, dB = _incident_derivatives(cfg)
    E = cfg.E

    def consts(h):
        return np.array(_constants(E + h, cfg.A + dA * h, cfg.B + dB * h, cfg).region(n))

    h = rel_step * E
    d_h = (consts(h) - consts(-h)) / (2.0 * h)
    d_h2 = (consts(h / 2) - consts(-h / 2)) / h
    deriv = (4.0 * d_h2 - d_h) / 3.0
    a, b, c, d = rc.region(n)
    if n == 2:
        raise ValidationError("activation parameters are defined in the free regions 1 and 3")
    return activation_from_constants(a, b, c, d, *deriv, k=cfg.k, dk_dE=cfg.m / (cfg.hbar**2 * cfg.k))


def region1_activation(cfg: BarrierConfig) -> FreeActivation:
    """Incident activation recomputed through the region-constant route."""
    return _activation(cfg, 1)


def region3_activation(cfg: BarrierConfig, rel_step: float = 1e-6) -> FreeActivation:
    """Transmitted-region activation.

    alpha1 comes straight from the region-3 constants.  alpha2 needs their
    energy derivatives, taken by Richardson-extrapolated central differences
    with step ``rel_step * E``.  The barrier edges and height are held fixed
    while E varies, and the incident A, B follow the E-dependence implied
    by the incident C, D.
    """
    return _activation(cfg, 3, rel_step)
