"""Special functions used by the closed-form clustor kinematics.

Two families live here:

* the cumulative arctangent ("catan"), computed by adaptive sampling and
  principal-angle differencing so that each half-turn adds pi to the
  accumulated angle;
* Kummer's confluent hypergeometric function M(a, b, z) together with its
  derivatives in z and in the parameter a, evaluated by direct power series
  for real a, half-integer b and non-negative z.

Digamma itself is never needed; only differences Psi(a+n) - Psi(a), which are
finite harmonic sums and are folded into the M_a series recurrence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import NonConvergentUnwrap, NumericalError, SeriesOverflow, ValidationError

__all__ = [
    "PhaseTrack",
    "unwrap_phase",
    "catan_eval",
    "KummerParams",
    "kummer_m",
    "kummer_mz",
    "kummer_ma",
    "kummer_mza",
    "kummer_m_and_ma",
    "digamma_difference",
    "pochhammer_digamma",
    "DEFAULT_TOL",
    "Z_MAX",
]

DEFAULT_TOL = 1e-12
#: Largest z = (mu x)^2 accepted by the series (mu x <= 30).
Z_MAX = 900.0

_ACCEPT = math.pi / 4.0
_RESCALE = 1e200
_LOG_RESCALE = math.log(_RESCALE)


# ---------------------------------------------------------------------------
# cumulative arctangent
# ---------------------------------------------------------------------------


@dataclass
class PhaseTrack:
    """Caller-owned state of an unwrapped arctangent.

    ``x`` is the abscissa of the last accepted sample (``None`` for a fresh
    track), ``last_angle`` the unwrapped angle there and ``principal`` the
    principal value of atan(N/D) at the same point.
    """

    x: Optional[float] = None
    last_angle: float = 0.0
    principal: float = 0.0

    @property
    def winding(self) -> int:
        """Number of half-turns separating the unwrapped and principal values."""
        return int(round((self.last_angle - self.principal) / math.pi))

    def reset(self) -> None:
        self.x = None
        self.last_angle = 0.0
        self.principal = 0.0


def _wrap(d):
    return (d + np.pi) % (2.0 * np.pi) - np.pi


def _principal(theta: float) -> float:
    """Map an atan2 angle onto the atan branch (-pi/2, pi/2]."""
    p = theta - math.pi * round(theta / math.pi)
    if p <= -math.pi / 2:
        p += math.pi
    return p


def _angles(pair_fn, xs):
    num, den = pair_fn(xs)
    num = np.broadcast_to(np.asarray(num, dtype=float), np.shape(xs))
    den = np.broadcast_to(np.asarray(den, dtype=float), np.shape(xs))
    if not (np.all(np.isfinite(num)) and np.all(np.isfinite(den))):
        raise NonConvergentUnwrap("numerator or denominator is not finite on the path")
    if np.any((num == 0.0) & (den == 0.0)):
        raise NonConvergentUnwrap("numerator and denominator vanish together")
    return np.arctan2(num, den)


def _subdivide(path, max_step):
    gaps = np.diff(path)
    if max_step is None or max_step <= 0:
        return path, np.arange(path.size)
    n_sub = np.maximum(1, np.ceil(np.abs(gaps) / max_step).astype(int))
    owner = np.repeat(np.arange(gaps.size), n_sub)
    offsets = np.concatenate(([0], np.cumsum(n_sub)))
    frac = (np.arange(owner.size) - offsets[owner]) / n_sub[owner]
    fine = np.concatenate((path[owner] + frac * gaps[owner], path[-1:]))
    return fine, offsets


def unwrap_phase(
    pair_fn: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]],
    xs,
    *,
    track: Optional[PhaseTrack] = None,
    max_step: Optional[float] = None,
    max_depth: int = 60,
) -> np.ndarray:
    """Unwrapped angle of the ratio N/D along a monotone path.

    Parameters
    ----------
    pair_fn : callable
        Vectorized function returning ``(N, D)`` for an array of abscissae.
    xs : array_like
        Points at which the angle is wanted, ordered along the path.
    track : PhaseTrack, optional
        Continuation state.  A fresh track starts at ``xs[0]`` with the
        principal value of atan(N/D); a used track continues from ``track.x``.
        The track is advanced to the last point.
    max_step : float, optional
        Largest initial spacing.  It has to keep the true phase change of each
        initial interval below pi, otherwise whole half-turns are aliased.
    max_depth : int
        Bisection depth after which an unresolved interval is an error.

    Returns
    -------
    ndarray
        Unwrapped angles at ``xs``.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if track is None:
        track = PhaseTrack()
    fresh = track.x is None
    start = xs[0] if fresh else track.x
    path = np.concatenate(([start], xs))
    steps = np.diff(path)
    if np.any(steps > 0) and np.any(steps < 0):
        raise ValidationError("unwrapping path must be monotone in x")

    fine, out_idx = _subdivide(path, max_step)
    theta = _angles(pair_fn, fine)
    delta = _wrap(np.diff(theta))

    bad = np.flatnonzero(np.abs(delta) >= _ACCEPT)
    if bad.size:
        delta[bad] = 0.0
        xa, xb = fine[bad], fine[bad + 1]
        ta, tb = theta[bad], theta[bad + 1]
        owner = bad
        for _ in range(max_depth):
            xm = 0.5 * (xa + xb)
            if np.any((xm == xa) | (xm == xb)):
                raise NonConvergentUnwrap(
                    "phase jump not resolvable at floating-point resolution near x=%r" % float(xm[0])
                )
            tm = _angles(pair_fn, xm)
            xa, xb = np.concatenate((xa, xm)), np.concatenate((xm, xb))
            ta, tb = np.concatenate((ta, tm)), np.concatenate((tm, tb))
            owner = np.concatenate((owner, owner))
            d = _wrap(tb - ta)
            ok = np.abs(d) < _ACCEPT
            np.add.at(delta, owner[ok], d[ok])
            keep = ~ok
            if not keep.any():
                break
            xa, xb, ta, tb, owner = xa[keep], xb[keep], ta[keep], tb[keep], owner[keep]
        else:
            raise NonConvergentUnwrap(
                "refinement depth %d exhausted near x=%r" % (max_depth, float(xa[0]))
            )

    base = _principal(float(theta[0])) if fresh else track.last_angle
    unwrapped = base + np.concatenate(([0.0], np.cumsum(delta)))
    result = unwrapped[out_idx[1:]]

    track.x = float(path[-1])
    track.last_angle = float(unwrapped[-1])
    track.principal = _principal(float(theta[-1]))
    return result


def catan_eval(
    numer_fn: Callable,
    denom_fn: Callable,
    x_from: float,
    x_to: float,
    track: Optional[PhaseTrack] = None,
    *,
    n_init: int = 64,
    max_step: Optional[float] = None,
) -> float:
    """Cumulative arctangent of ``numer_fn(x) / denom_fn(x)`` at ``x_to``.

    With a fresh track the result starts from the principal value at
    ``x_from``; passing a used track continues its accumulated angle.

    >>> import numpy as np
    >>> round(catan_eval(np.sin, np.cos, 0.0, 2.3), 12)
    2.3
    """
    if track is None:
        track = PhaseTrack()
    span = abs(x_to - x_from)
    if max_step is None:
        max_step = span / n_init if span > 0 else None

    def pair(x):
        return numer_fn(x), denom_fn(x)

    if track.x is None:
        xs = np.array([x_from, x_to])
    else:
        xs = np.array([x_from, x_to]) if track.x != x_from else np.array([x_to])
    return float(unwrap_phase(pair, xs, track=track, max_step=max_step)[-1])


# ---------------------------------------------------------------------------
# Kummer's confluent hypergeometric function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KummerParams:
    """Arguments of M(a, b, z) with the validity rules of this package."""

    a: float
    b: float
    z: float

    def __post_init__(self):
        _check_ab(self.a, self.b)
        if not (self.z >= 0.0):
            raise ValidationError("z must be non-negative, got %r" % (self.z,))


def _check_ab(a, b):
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValidationError("a and b must be finite")
    if b <= 0 and float(b).is_integer():
        raise ValidationError("b must not be a non-positive integer, got %r" % (b,))


def _unpack(a, b, z):
    if isinstance(a, KummerParams):
        return a.a, a.b, a.z
    return a, b, z


def _kummer_series(a, b, z, *, want_a, scaled, tol):
    """Sum M(a,b,z) (and dM/da) for a vector of z.

    Terms obey T_n = T_{n-1} (a+n-1) r_n with r_n = z / ((b+n-1) n).  The
    a-derivative of T_n is (a)_n [Psi(a+n) - Psi(a)] z^n / ((b)_n n!), whose
    Pochhammer-times-harmonic-sum factor is sum_k prod_{j != k} (a+j).  It
    satisfies U_n = (U_{n-1} (a+n-1) + T_{n-1}) r_n, which never divides by
    a+k and therefore stays finite at non-positive integer a.
    """
    _check_ab(a, b)
    z = np.asarray(z, dtype=float)
    shape = z.shape
    z = np.atleast_1d(z).ravel()
    if not np.all(np.isfinite(z)) or np.any(z < 0):
        raise ValidationError("z must be finite and non-negative")
    if z.size and z.max() > Z_MAX:
        raise SeriesOverflow("z=%g exceeds the series guard %g" % (z.max(), Z_MAX))

    term = np.ones_like(z)
    total = np.ones_like(z)
    peak = np.ones_like(z)
    dterm = np.zeros_like(z)
    dtotal = np.zeros_like(z)
    dpeak = np.zeros_like(z)
    logs = np.zeros_like(z)
    streak = np.zeros(z.shape, dtype=int)
    zmax = float(z.max()) if z.size else 0.0
    n_max = int(zmax + 60.0 * math.sqrt(zmax + 1.0) + 200)

    n = 0
    while True:
        n += 1
        if n > n_max:
            raise NumericalError("Kummer series did not converge in %d terms" % n_max)
        r = z / ((b + (n - 1.0)) * n)
        if want_a:
            dterm = (dterm * (a + (n - 1.0)) + term) * r
            dtotal = dtotal + dterm
            dpeak = np.maximum(dpeak, np.abs(dtotal))
        term = term * (a + (n - 1.0)) * r
        total = total + term
        peak = np.maximum(peak, np.abs(total))

        big = np.maximum(np.abs(total), np.abs(term))
        if want_a:
            big = np.maximum(big, np.maximum(np.abs(dtotal), np.abs(dterm)))
        over = big > _RESCALE
        if over.any():
            for arr in (term, total, peak, dterm, dtotal, dpeak):
                arr[over] /= _RESCALE
            logs[over] += _LOG_RESCALE

        small = (np.abs(term) <= tol * np.abs(total)) | (np.abs(term) <= 1e-17 * peak)
        if want_a:
            small &= (np.abs(dterm) <= tol * np.abs(dtotal)) | (np.abs(dterm) <= 1e-17 * dpeak)
        small &= n > z
        streak = np.where(small, streak + 1, 0)
        if np.all(streak >= 3):
            break

    factor = np.exp(logs - z) if scaled else np.exp(logs)
    with np.errstate(over="ignore", invalid="ignore"):
        m = total * factor
        ma = dtotal * factor if want_a else None
    if not np.all(np.isfinite(m)) or (want_a and not np.all(np.isfinite(ma))):
        raise SeriesOverflow("Kummer value not representable; use scaled=True")
    m = m.reshape(shape)
    if want_a:
        ma = ma.reshape(shape)
    return m, ma


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def kummer_m(a, b=None, z=None, *, scaled: bool = False, tol: float = DEFAULT_TOL):
    """Kummer's function M(a, b, z) by direct power series.

    With ``scaled=True`` the result is exp(-z) M(a, b, z), which stays
    representable over the whole guarded range z <= 900.  The series is a
    finite polynomial when a is a non-positive integer.

    >>> kummer_m(0.5, 0.5, 1.0)  # doctest: +ELLIPSIS
    2.718281828459...
    """
    a, b, z = _unpack(a, b, z)
    return _out(_kummer_series(a, b, z, want_a=False, scaled=scaled, tol=tol)[0])


def kummer_mz(a, b=None, z=None, *, scaled: bool = False, tol: float = DEFAULT_TOL):
    """dM/dz through the shift identity M_z = (a/b) M(a+1, b+1, z)."""
    a, b, z = _unpack(a, b, z)
    _check_ab(a, b)
    if a == 0:
        return _out(np.zeros_like(np.asarray(z, dtype=float)))
    m1 = _kummer_series(a + 1.0, b + 1.0, z, want_a=False, scaled=scaled, tol=tol)[0]
    return _out((a / b) * m1)


def kummer_m_and_ma(a, b=None, z=None, *, scaled: bool = False, tol: float = DEFAULT_TOL):
    """Return ``(M, dM/da)`` from a single series pass."""
    a, b, z = _unpack(a, b, z)
    m, ma = _kummer_series(a, b, z, want_a=True, scaled=scaled, tol=tol)
    return _out(m), _out(ma)


def kummer_ma(a, b=None, z=None, *, scaled: bool = False, tol: float = DEFAULT_TOL):
    """Parameter derivative dM/da, finite at non-positive integer a."""
    return kummer_m_and_ma(a, b, z, scaled=scaled, tol=tol)[1]


def kummer_mza(a, b=None, z=None, *, scaled: bool = False, tol: float = DEFAULT_TOL):
    """Mixed derivative d2M/(dz da) = (a/b) M_a(a+1,b+1,z) + M(a+1,b+1,z)/b."""
    a, b, z = _unpack(a, b, z)
    _check_ab(a, b)
    m1, ma1 = _kummer_series(a + 1.0, b + 1.0, z, want_a=True, scaled=scaled, tol=tol)
    return _out((a / b) * ma1 + m1 / b)


def digamma_difference(a: float, n: int) -> float:
    """Psi(a+n) - Psi(a) as the finite harmonic sum sum_{k<n} 1/(a+k)."""
    n = int(n)
    if n < 0:
        raise ValidationError("n must be non-negative")
    ks = a + np.arange(n, dtype=float)
    if np.any(ks == 0.0):
        raise ValidationError("a + k vanishes for some k < n; the difference has a pole")
    return float(np.sum(1.0 / ks))


def pochhammer_digamma(a: float, n: int) -> float:
    """(a)_n [Psi(a+n) - Psi(a)] as sum_k prod_{j != k} (a+j).

    This product form is finite for every real a, including the non-positive
    integers where the Pochhammer symbol vanishes and the harmonic sum has a
    pole.
    """
    n = int(n)
    if n <= 0:
        return 0.0
    f = a + np.arange(n, dtype=float)
    prefix = np.concatenate(([1.0], np.cumprod(f)[:-1]))
    suffix = np.concatenate((np.cumprod(f[::-1])[::-1][1:], [1.0]))
    return float(np.sum(prefix * suffix))
