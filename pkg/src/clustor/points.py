"""Clustor points: intersections of a world-line t(x) with a simultaneity line.

A world-line is any vectorized callable ``t_of_x``.  Points are found by
sign-change bracketing on a uniform grid, with an extra probe at every
grid-level extremum so that close pairs of roots inside one cell are not
missed, and then refined by bisection.  Each point is classified by the
sign of dt/dx: positive points carry (+m, +E), negative points (-m, -E).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from .errors import ClustorError, ParityViolation, RootCollision, ValidationError, WindowNotClosed

__all__ = [
    "ClustorPoint",
    "ClustorSnapshot",
    "find_points",
    "auto_window",
    "auto_points",
    "sweep",
    "assign_mass_energy",
    "count_deltas",
    "newtonian_sweep_step",
    "track_velocities",
]

POSITIVE = "positive"
NEGATIVE = "negative"
_EDGE = 5
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ClustorPoint:
    x: float
    sign_class: str
    mass: Optional[float] = None
    energy: Optional[float] = None
    merged: bool = False


@dataclass
class ClustorSnapshot:
    t_star: float
    points: List[ClustorPoint] = field(default_factory=list)
    window: Tuple[float, float] = (float("nan"), float("nan"))
    valid: bool = True
    error: Optional[str] = None

    @property
    def count(self) -> int:
        return len(self.points)

    @property
    def positions(self) -> np.ndarray:
        return np.array([p.x for p in self.points])

    @property
    def merged(self) -> bool:
        return any(p.merged for p in self.points)

    def _simple(self):
        return [p for p in self.points if not p.merged]

    @property
    def n_positive(self) -> int:
        return sum(p.sign_class == POSITIVE for p in self._simple())

    @property
    def n_negative(self) -> int:
        return sum(p.sign_class == NEGATIVE for p in self._simple())

    @property
    def total_mass(self) -> float:
        return float(sum(p.mass for p in self.points if p.mass is not None))

    @property
    def total_energy(self) -> float:
        return float(sum(p.energy for p in self.points if p.energy is not None))

    def alternates(self) -> bool:
        """True when the sign classes of the simple points alternate in x-order."""
        cls = [p.sign_class for p in self._simple()]
        return all(a != b for a, b in zip(cls, cls[1:]))


def _check_window(window):
    lo, hi = float(window[0]), float(window[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValidationError("window must be a finite (x_lo, x_hi) with x_lo < x_hi, got %r" % (window,))
    return lo, hi


def _window_closed(f, scale: float) -> bool:
    """Both ends on monotone stretches heading away from the simultaneity line.

    Decreases below 1e-10 of ``scale`` count as flat, so that world-lines
    with converged asymptotes (the oscillator) can close.
    """
    left, right = f[:_EDGE], f[-_EDGE:]
    noise = -1e-10 * scale
    return bool(
        np.all(np.diff(left) >= noise)
        and np.all(np.diff(right) >= noise)
        and np.all(left < 0.0)
        and np.all(right > 0.0)
    )


def _edge_samples(lo, hi, grid_n):
    xs = np.linspace(lo, hi, int(grid_n))
    return np.concatenate((xs[:_EDGE], xs[-_EDGE:]))


def _probe_extrema(g, xs, f):
    """Extra nodes at grid-level extrema where the curve dips across zero.

    Only dips whose distance from zero is within four times the local
    variation are probed; flat stretches with roundoff wiggles are skipped.
    """
    same = (f[:-2] * f[1:-1] > 0.0) & (f[1:-1] * f[2:] > 0.0)
    af = np.abs(f)
    dip = (af[1:-1] < af[:-2]) & (af[1:-1] <= af[2:])
    local = np.maximum(np.abs(f[:-2] - f[1:-1]), np.abs(f[2:] - f[1:-1]))
    dip &= af[1:-1] < 4.0 * local
    extra = []
    xatol = 1e-13 * (xs[-1] - xs[0])
    for i in np.flatnonzero(same & dip) + 1:
        s = math.copysign(1.0, f[i])
        res = optimize.minimize_scalar(lambda x: s * float(g(x)), bounds=(xs[i - 1], xs[i + 1]),
                                       method="bounded", options={"xatol": xatol})
        if s * res.fun < 0.0:
            extra.append(float(res.x))
    return extra


def _bisect_all(g, a, b, fa, xtol):
    """Bisection on many brackets at once (one vectorized call per halving)."""
    a, b = a.copy(), b.copy()
    neg = fa < 0.0
    n = int(math.ceil(math.log2(max(float(np.max(b - a)), xtol) / xtol))) + 1
    for _ in range(n):
        mid = 0.5 * (a + b)
        fm = g(mid)
        left = (fm < 0.0) == neg  # same side as a: move a up
        a = np.where(left, mid, a)
        b = np.where(left, b, mid)
        done = fm == 0.0
        if np.any(done):
            a = np.where(done, mid, a)
            b = np.where(done, mid, b)
    return 0.5 * (a + b)


def find_points(
    world_line: Callable,
    t_star: float,
    window: Sequence[float],
    grid_n: int = 2001,
    check_window: bool = True,
    strict: bool = False,
) -> ClustorSnapshot:
    """All intersections of ``world_line`` with t = ``t_star`` inside ``window``.

    The window must close: the first and last five grid samples lie on the
    correct side of t* on non-decreasing stretches, otherwise
    WindowNotClosed is raised.  Roots are refined by bisection to 1e-12 of
    the window width and classified by the centered difference of t.
    Roots closer than the refinement resolution are kept with
    ``merged=True`` and left out of the parity bookkeeping; with
    ``strict=True`` they raise RootCollision.
    """
    lo, hi = _check_window(window)
    if grid_n < 2 * _EDGE:
        raise ValidationError("grid_n must be at least %d" % (2 * _EDGE))
    width = hi - lo
    xtol = 1e-12 * width

    def g(x):
        return np.asarray(world_line(np.asarray(x, dtype=float)), dtype=float) - t_star

    xs = np.linspace(lo, hi, int(grid_n))
    f = g(xs)
    if not np.all(np.isfinite(f)):
        raise ValidationError("world-line is not finite on the window")
    scale = float(np.max(np.abs(f + t_star)))
    if check_window and not _window_closed(f, scale):
        raise WindowNotClosed(
            "window (%g, %g) does not close around t* = %g; widen it or use auto_window" % (lo, hi, t_star)
        )
    extra = _probe_extrema(g, xs, f)
    if extra:
        xs = np.concatenate((xs, extra))
        order = np.argsort(xs, kind="stable")
        xs = xs[order]
        f = np.concatenate((f, g(np.array(extra))))[order]

    idx = np.flatnonzero((f[:-1] * f[1:] < 0.0) | (f[:-1] == 0.0))
    exact = f[idx] == 0.0
    r = np.where(exact, xs[idx], 0.0)
    br = idx[~exact]
    if br.size:
        r[~exact] = _bisect_all(g, xs[br], xs[br + 1], f[br], xtol)
    rising = np.where(exact, f[np.minimum(idx + 1, f.size - 1)] > 0.0, f[idx] < 0.0)
    roots = list(zip(r.tolist(), rising.tolist()))

    points = []
    positions = [r for r, _ in roots]
    cell = width / (grid_n - 1)
    for j, (r, rising) in enumerate(roots):
        gaps = [abs(r - positions[q]) for q in (j - 1, j + 1) if 0 <= q < len(positions)]
        nearest = min(gaps) if gaps else width
        merged = nearest < 10.0 * xtol
        if merged and strict:
            raise RootCollision("roots at x = %.15g are closer than the refinement resolution" % r)
        cls = rising
        if not merged:
            d = min(nearest, cell) / 4.0
            diff = float(g(r + d)) - float(g(r - d))
            if diff != 0.0:
                cls = diff > 0.0
        points.append(ClustorPoint(x=float(r), sign_class=POSITIVE if cls else NEGATIVE, merged=merged))
    return ClustorSnapshot(t_star=float(t_star), points=points, window=(lo, hi))


def _edge_ok(tb, t_star, left: bool) -> np.ndarray:
    """Rows of edge-band samples that close the window on one side."""
    f = tb - t_star
    noise = -1e-10 * np.max(np.abs(tb), axis=1, keepdims=True)
    rising = np.all(np.diff(f, axis=1) >= noise, axis=1)
    side = np.all(f < 0.0, axis=1) if left else np.all(f > 0.0, axis=1)
    return rising & side & np.all(np.isfinite(tb), axis=1)


def auto_points(
    world_line: Callable,
    t_star: float,
    center: float = 0.0,
    half_width: float = 1.0,
    max_half_width: float = 1e4,
    samples_per_unit: Optional[float] = None,
    min_grid: int = 201,
    tries: int = 256,
) -> ClustorSnapshot:
    """Snapshot on an automatically grown window around ``center``.

    The left and right edges are chosen independently.  Each side tries
    up to ``tries`` distances in [h, 2h) from ``center``, in quasi-random
    order, and takes the first whose edge band closes; h starts at
    ``half_width``.  Free clustors with strong activation oscillate
    forever and close only on short rising stretches, which a symmetric
    window would rarely hit on both sides at once.

    After each closed window, h on each side becomes twice that side's
    edge distance.  The window is accepted when the next one finds the
    same point count.  The grid keeps at least ``samples_per_unit``
    samples per unit length (default 200 per unit of ``half_width``).
    """
    if not (half_width > 0 and max_half_width >= half_width):
        raise ValidationError("need 0 < half_width <= max_half_width")
    density = samples_per_unit if samples_per_unit is not None else 200.0 / half_width
    step = 1.0 / density
    offs = np.arange(_EDGE) * step

    def t_of(x):
        return np.asarray(world_line(np.asarray(x, dtype=float)), dtype=float)

    frac = 1.0 + (np.arange(tries) * _GOLDEN) % 1.0
    hl = hr = half_width
    prev = None
    while min(hl, hr) <= max_half_width:
        # golden-ratio offsets stay incommensurate with any period of the
        # world-line, so repeated doublings do not revisit the same phases
        hs_l = np.minimum(hl * frac, max_half_width)
        hs_r = np.minimum(hr * frac, max_half_width)
        left = (center - hs_l)[:, None] + offs
        right = (center + hs_r)[:, None] - offs[::-1]
        tb = t_of(np.concatenate((left, right)).ravel()).reshape(2 * tries, _EDGE)
        ok_l = np.flatnonzero(_edge_ok(tb[:tries], t_star, True))
        ok_r = np.flatnonzero(_edge_ok(tb[tries:], t_star, False))
        found = None
        for i, j in zip(ok_l[:8], ok_r[:8]):
            lo, hi = center - hs_l[i], center + hs_r[j]
            n = max(min_grid, int(math.ceil((hi - lo) * density)) + 1)
            try:
                found = find_points(world_line, t_star, (lo, hi), grid_n=n)
                break
            except WindowNotClosed:
                continue
        if found is None:
            prev = None
            hl, hr = 2.0 * hl, 2.0 * hr
        else:
            if prev is not None and prev.count == found.count:
                return prev
            prev = found
            # the next window reaches at least twice as far on each side
            hl, hr = 2.0 * (center - found.window[0]), 2.0 * (found.window[1] - center)
    if prev is not None:
        return prev
    raise WindowNotClosed("no closed window up to half-width %g around t* = %g" % (max_half_width, t_star))


def auto_window(world_line: Callable, t_star: float, **kw) -> Tuple[float, float]:
    """Window chosen by :func:`auto_points`."""
    return auto_points(world_line, t_star, **kw).window


def assign_mass_energy(snapshot: ClustorSnapshot, m: float, E: float) -> ClustorSnapshot:
    """Give (+m, +E) to positive points and (-m, -E) to negative ones."""
    npos, nneg = snapshot.n_positive, snapshot.n_negative
    if (npos + nneg) % 2 != 1 or npos != nneg + 1:
        raise ParityViolation(
            "snapshot at t* = %g has %d positive and %d negative points" % (snapshot.t_star, npos, nneg)
        )
    pts = []
    for p in snapshot.points:
        if p.merged:
            pts.append(replace(p, mass=0.0, energy=0.0))
        elif p.sign_class == POSITIVE:
            pts.append(replace(p, mass=m, energy=E))
        else:
            pts.append(replace(p, mass=-m, energy=-E))
    return replace(snapshot, points=pts)


def sweep(
    world_line: Callable,
    t_from: float,
    t_to: float,
    frames: int,
    window: Optional[Sequence[float]] = None,
    m: Optional[float] = None,
    E: Optional[float] = None,
    grid_n: int = 2001,
    **window_kw,
) -> List[ClustorSnapshot]:
    """Snapshots at uniformly spaced t*.

    With ``window=None`` every frame gets its own auto_window.  A frame
    whose extraction fails is kept with ``valid=False`` and the error text.
    """
    if frames < 1:
        raise ValidationError("frames must be positive")
    out = []
    for ts in np.linspace(t_from, t_to, int(frames)):
        try:
            if window is None:
                snap = auto_points(world_line, ts, **window_kw)
            else:
                snap = find_points(world_line, ts, window, grid_n=grid_n)
            if m is not None and E is not None:
                snap = assign_mass_energy(snap, m, E)
        except ClustorError as exc:
            snap = ClustorSnapshot(t_star=float(ts), valid=False, error="%s: %s" % (type(exc).__name__, exc))
        out.append(snap)
    return out


def count_deltas(snapshots: Sequence[ClustorSnapshot]) -> np.ndarray:
    """Count differences between consecutive valid snapshots."""
    counts = [s.count for s in snapshots if s.valid]
    return np.diff(np.asarray(counts, dtype=int))


def newtonian_sweep_step(dx: float, m: float, E: float) -> float:
    """Uniform sweep increment dt = dx sqrt(m / 2E) of the Newtonian standard."""
    if not (m > 0 and E > 0):
        raise ValidationError("m and E must be positive")
    return dx * math.sqrt(m / (2.0 * E))


def track_velocities(a: ClustorSnapshot, b: ClustorSnapshot) -> Optional[np.ndarray]:
    """Finite-difference velocities of points tracked by order between two frames.

    Returns None when the frames do not have the same number of points,
    since roots cannot then be matched one to one.
    """
    if not (a.valid and b.valid) or a.count != b.count or a.count == 0:
        return None
    dt = b.t_star - a.t_star
    if dt == 0:
        raise ValidationError("frames share the same t*")
    return (b.positions - a.positions) / dt
