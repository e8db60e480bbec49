"""Registry of the 26 figure datasets.

Every entry records the parameters of one figure, a builder that returns a
:class:`~clustor.io.Dataset` in the natural units of its system, and a
check that re-verifies the module invariants the dataset must satisfy.
``build_figure(n)`` is deterministic: the same id always yields the same
numbers.

Natural units
    free and barrier: x in 1/k, W in h, p in ħk, t in m/(ħk²)
    oscillator: x in 1/μ, W and J in h, p in ħμ, t in τ_N, density in μ
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np

from . import __version__
from .barrier import BarrierConfig, barrier_action_grid, barrier_momentum, region3_activation
from .errors import UnknownFigure
from .free import FreeConfig, free_activation, free_dynamics_grid, free_world_line
from .io import Dataset
from .oscillator import (
    OscConfig,
    action_step_positions,
    full_cycle_action,
    ground_state_density,
    newtonian_density,
    newtonian_osc_grid,
    omega_ratio,
    osc_density,
    osc_dynamics_grid,
    osc_period,
    osc_world_line,
    quantization_scan,
)
from .points import auto_points, find_points, sweep
from .specfun import PhaseTrack, unwrap_phase

__all__ = ["FigureSpec", "REGISTRY", "build_figure", "check_figure", "figure_ids"]

FREE_UNITS = {"x": "1/k", "W": "h", "p": "hbar*k", "t": "m/(hbar*k^2)", "t_star": "m/(hbar*k^2)"}
OSC_UNITS = {"x": "1/mu", "W": "h", "p": "hbar*mu", "t": "tau_N", "J": "h", "eta": "1",
             "omega_ratio": "omega_N", "density": "mu", "t_star": "tau_N"}
PARITY_CODE = {"zero-point": -1.0, "even": 0.0, "odd": 1.0}
TWO_PI = 2.0 * math.pi


@dataclass
class FigureSpec:
    fig_id: int
    title: str
    system: str
    params: Dict[str, object]
    build: Callable[["FigureSpec", float], Dataset]
    check: Callable[[Dataset], List[str]]
    units: Dict[str, str] = field(default_factory=dict)


def _new(spec: "FigureSpec", tol: float) -> Dataset:
    meta = {"figure": spec.fig_id, "title": spec.title, "system": spec.system, "tool_version": __version__,
            "tol": tol}
    meta.update({"param." + k: v for k, v in spec.params.items()})
    return Dataset(name="figure-%02d" % spec.fig_id, units=dict(spec.units), metadata=meta)


def _fail(cond: bool, msg: str, out: List[str]) -> None:
    if not cond:
        out.append(msg)


# ---------------------------------------------------------------------------
# catan staircases (figures 1, 2)
# ---------------------------------------------------------------------------


def _catan_curve(a: float):
    x = np.linspace(0.0, 3.0 * math.pi, 601)

    def pair(u):
        return a * np.sin(u), np.cos(u)

    g = unwrap_phase(pair, x, track=PhaseTrack(), max_step=0.1)
    return x, g


def _build_staircase(spec, tol):
    ds = _new(spec, tol)
    x, g = _catan_curve(spec.params["a"])
    ds.add("f", x=x, y=x.copy())
    ds.add("g", x=x, y=g)
    return ds


def _check_staircase(ds):
    out: List[str] = []
    x, g = ds["g"]["x"], ds["g"]["y"]
    _fail(bool(np.all(np.diff(g) >= -1e-12)), "catan curve is not monotone", out)
    on = np.isclose(np.mod(x, math.pi), 0.0, atol=1e-9) | np.isclose(np.mod(x, math.pi), math.pi, atol=1e-9)
    _fail(bool(np.allclose(g[on], x[on], atol=1e-9)), "g(n pi) differs from n pi", out)
    _fail(bool(np.max(np.abs(g - x)) < math.pi / 2 + 1e-9), "g leaves the band |g - x| < pi/2", out)
    return out


# ---------------------------------------------------------------------------
# free clustor (figures 3-7)
# ---------------------------------------------------------------------------

_FREE_X = np.linspace(0.0, 4.0 * math.pi, 801)  # spacing pi/200; lambda/2 is 200 samples
_HALF = 200


def _free_cfg(A=1.0, B=0.0, C=0.0, D=0.0):
    return FreeConfig(m=1.0, E=0.5, A=A, B=B, C=C, D=D, hbar=1.0)


def _build_free_action(spec, tol):
    ds = _new(spec, tol)
    for A in spec.params["A"]:
        W, _, _ = free_dynamics_grid(_free_cfg(A), _FREE_X)
        ds.add("A=%g" % A, x=_FREE_X, W=W / TWO_PI)
    ds.add("newtonian", x=_FREE_X, W=_FREE_X / TWO_PI)
    return ds


def _check_free_action(ds):
    out: List[str] = []
    for s in ds.series:
        W = s["W"]
        step = W[_HALF:] - W[:-_HALF]
        _fail(bool(np.allclose(step, 0.5, atol=1e-9)), "%s: W(x + lambda/2) - W(x) != h/2" % s.name, out)
        _fail(bool(np.all(np.diff(W) > 0)), "%s: W not increasing" % s.name, out)
    return out


def _build_free_momentum(spec, tol):
    ds = _new(spec, tol)
    for A in spec.params["A"]:
        _, p, _ = free_dynamics_grid(_free_cfg(A), _FREE_X)
        ds.add("A=%g" % A, x=_FREE_X, p=p)
    ds.add("average", x=_FREE_X, p=np.ones_like(_FREE_X))
    return ds


def _check_free_momentum(ds):
    out: List[str] = []
    for s in ds.series:
        p = s["p"]
        _fail(bool(np.all(p > 0)), "%s: p not positive" % s.name, out)
        _fail(bool(np.allclose(p[_HALF:], p[:-_HALF], rtol=1e-9)), "%s: p not lambda/2-periodic" % s.name, out)
    for s in ds.series:
        if s.name.startswith("A="):
            A = float(s.name[2:])
            alpha1 = free_activation(_free_cfg(A)).alpha1
            pmax, pmin = math.sqrt((1 + alpha1) / (1 - alpha1)), math.sqrt((1 - alpha1) / (1 + alpha1))
            _fail(bool(np.all(s["p"] <= pmax * (1 + 1e-12))) and bool(np.all(s["p"] >= pmin * (1 - 1e-12))),
                  "%s: p outside its kernel bounds" % s.name, out)
    return out


def _snapshot_series(ds, name, snap):
    ds.add(name, x=snap.positions, t_star=np.full(snap.count, snap.t_star),
           sign=np.array([1.0 if p.sign_class == "positive" else -1.0 for p in snap.points]),
           mass=np.array([p.mass if p.mass is not None else np.nan for p in snap.points]),
           energy=np.array([p.energy if p.energy is not None else np.nan for p in snap.points]))


def _build_free_world_line(spec, tol):
    from .points import assign_mass_energy

    ds = _new(spec, tol)
    cfg = _free_cfg(spec.params["A"])
    x = np.linspace(0.0, spec.params["x_max"], 1201)
    _, _, t = free_dynamics_grid(cfg, x)
    ds.add("world_line", x=x, t=t)
    wl = free_world_line(cfg)
    ts = spec.params["t_star"]
    if spec.params.get("window") is None:
        snap = assign_mass_energy(auto_points(wl, ts), cfg.m, cfg.E)
    else:
        snap = find_points(wl, ts, spec.params["window"], grid_n=20001, check_window=False)
    _snapshot_series(ds, "snapshot", snap)
    return ds


def _check_alternation(sign, out, name):
    _fail(bool(np.all(sign[1:] != sign[:-1])), "%s: sign classes do not alternate" % name, out)


def _check_fig5(ds):
    out: List[str] = []
    s = ds["snapshot"]
    _fail(len(s) == 5, "expected 5 clustor points, found %d" % len(s), out)
    _check_alternation(s["sign"], out, "snapshot")
    _fail(abs(float(np.sum(s["mass"])) - 1.0) < 1e-12, "masses do not sum to m", out)
    _fail(abs(float(np.sum(s["energy"])) - 0.5) < 1e-12, "energies do not sum to E", out)
    return out


def _check_fig6(ds):
    out: List[str] = []
    s = ds["snapshot"]
    _fail(len(s) > 0, "no clustor points in the window", out)
    _check_alternation(s["sign"], out, "snapshot")
    # points cluster at the momentum peaks kx = (n + 1/2) pi
    off = np.abs(np.mod(s["x"], math.pi) - math.pi / 2)
    _fail(bool(np.all(off < 0.1)), "points are not at the quasi-periodic peak positions", out)
    return out


def _build_fig7(spec, tol):
    ds = _new(spec, tol)
    cfg = _free_cfg(A=1.0, C=spec.params["C"], D=spec.params["D"])
    x = np.linspace(-2.0 * math.pi, 6.0 * math.pi, 1601)
    _, _, t = free_dynamics_grid(cfg, x)
    ds.add("world_line", x=x, t=t)
    frames = sweep(free_world_line(cfg), spec.params["t_from"], spec.params["t_to"], spec.params["frames"],
                   m=cfg.m, E=cfg.E)
    widths = np.array([s.positions.max() - s.positions.min() if s.valid and s.count else np.nan for s in frames])
    ds.add("sweep", t_star=np.array([s.t_star for s in frames]),
           count=np.array([s.count if s.valid else np.nan for s in frames], dtype=float),
           width=widths / TWO_PI)
    ds.units["width"] = "lambda"
    return ds


def _check_fig7(ds):
    out: List[str] = []
    c = ds["sweep"]["count"]
    _fail(bool(np.all(np.isfinite(c))), "some sweep frames failed", out)
    c = c[np.isfinite(c)]
    _fail(bool(np.all(c <= 7)), "more than seven clustor points", out)
    _fail(bool(np.all(np.mod(c, 2) == 1)), "even point count", out)
    _fail(set(np.diff(c).tolist()) <= {0.0, 2.0, -2.0}, "count changes other than 0, +-2", out)
    return out


# ---------------------------------------------------------------------------
# barrier (figure 8)
# ---------------------------------------------------------------------------


def _barrier_cfg(p):
    return BarrierConfig.in_wavelengths(p["V_over_E"], p["x1"], p["x2"], m=1.0, E=0.5, hbar=1.0)


def _build_fig8(spec, tol):
    ds = _new(spec, tol)
    cfg = _barrier_cfg(spec.params)
    x = np.linspace(0.0, 6.0 * TWO_PI, 1201)  # lambda/2 is 100 samples
    W = barrier_action_grid(cfg, x)
    ds.add("barrier", x=x, W=W / TWO_PI, p=barrier_momentum(cfg, x))
    ds.add("newtonian", x=x, W=x / TWO_PI, p=np.ones_like(x))
    act = region3_activation(cfg)
    ds.metadata.update({"result.alpha1": act.alpha1, "result.alpha2": act.alpha2})
    return ds


def _check_fig8(ds):
    out: List[str] = []
    s = ds["barrier"]
    x, W = s["x"], s["W"]
    _fail(bool(np.all(np.diff(W) > 0)), "barrier action not increasing", out)
    # continuity: no jump larger than the local slope allows across the edges
    dW = np.diff(W)
    _fail(bool(np.max(dW) < 0.5), "action jumps by h/2 or more between samples", out)
    reg3 = x >= 3.0 * TWO_PI
    W3 = W[reg3]
    _fail(bool(np.allclose(W3[100:] - W3[:-100], 0.5, atol=1e-9)), "region-3 staircase step != h/2", out)
    _fail(abs(ds.metadata["result.alpha1"] - 0.998) < 0.001, "region-3 alpha1 off the .998 anchor", out)
    return out


# ---------------------------------------------------------------------------
# oscillator (figures 9-26)
# ---------------------------------------------------------------------------


def _osc_x(eta, extra=3.0, n=801):
    X = math.sqrt(2 * eta + 1) + extra
    return np.linspace(-X, X, n)


def _newtonian_series(ds, eta, n=401, what="W"):
    Xt = math.sqrt(2 * eta + 1)
    xn = np.linspace(-Xt, Xt, n)
    W, p, t = newtonian_osc_grid(eta, xn)
    col = {"W": W / TWO_PI, "p": p, "t": t / TWO_PI}[what]
    ds.add("newtonian", **{"x": xn, what: col})


def _build_osc_curve(spec, tol):
    """Action, momentum or world-line curves for one eta and one or more a."""
    ds = _new(spec, tol)
    eta, what = spec.params["eta"], spec.params["quantity"]
    x = _osc_x(eta, spec.params.get("extra", 3.0))
    for a in spec.params["a"]:
        W, p, t = osc_dynamics_grid(OscConfig(eta, a=a), x)
        col = {"W": W / TWO_PI, "p": p, "t": t / TWO_PI}[what]
        ds.add("a=%g" % a, **{"x": x, what: col})
    _newtonian_series(ds, eta, what=what)
    ds.metadata["turning_point"] = math.sqrt(2 * eta + 1)
    return ds


def _check_osc_curve(ds):
    out: List[str] = []
    what = ds.metadata["param.quantity"]
    for s in ds.series:
        if s.name == "newtonian":
            continue
        x, y = s["x"], s[what]
        _fail(bool(np.allclose(y, -y[::-1], atol=1e-12) if what != "p" else np.allclose(y, y[::-1], rtol=1e-10)),
              "%s: wrong symmetry in x" % s.name, out)
        if what == "W":
            _fail(bool(np.all(np.diff(y) > 0)), "%s: action not increasing" % s.name, out)
        if what == "p":
            _fail(bool(np.all(y > 0)), "%s: momentum not positive" % s.name, out)
            a = float(s.name[2:])
            eta = ds.metadata["param.eta"]
            mid = np.argmin(np.abs(x))
            _fail(abs(y[mid] - a * math.sqrt(2 * eta + 1)) < 1e-9 if x[mid] == 0 else True,
                  "%s: p(0) != hbar mu A" % s.name, out)
    if what == "W" and ds.metadata["param.eta"] == 12 and "a=1" in ds.names():
        s = ds["a=1"]
        i = int(np.argmin(np.abs(s["x"] - 1.0)))
        WN = newtonian_osc_grid(12.0, np.array([s["x"][i]]))[0][0] / TWO_PI
        _fail(abs(s["W"][i] / WN - 1.0) < 0.02, "eta=12 action off the Newtonian value at x=1", out)
    return out


def _build_osc_world_lines(spec, tol):
    ds = _new(spec, tol)
    for eta in spec.params["eta"]:
        x = _osc_x(eta)
        _, _, t = osc_dynamics_grid(OscConfig(eta), x)
        ds.add("eta=%g" % eta, x=x, t=t / TWO_PI)
        Xt = math.sqrt(2 * eta + 1)
        xn = np.linspace(-Xt, Xt, 401)
        ds.add("newtonian eta=%g" % eta, x=xn, t=newtonian_osc_grid(eta, xn)[2] / TWO_PI)
        ds.metadata["period.eta=%g" % eta] = osc_period(OscConfig(eta), rtol=tol)
    return ds


def _check_osc_world_lines(ds):
    out: List[str] = []
    for s in ds.series:
        t = s["t"]
        _fail(bool(np.allclose(t, -t[::-1], atol=1e-12)), "%s: t not odd" % s.name, out)
        if not s.name.startswith("newtonian"):
            tau = ds.metadata["period." + s.name]
            _fail(bool(np.all(np.abs(t) <= tau / (4 * TWO_PI) * (1 + 1e-9))), "%s: |t| exceeds tau/4" % s.name, out)
    return out


def _density(eta: float, extra: float = 5.0):
    """Grid, density result and L1 distance from the Newtonian density inside the turning points."""
    Xt = math.sqrt(2 * eta + 1)
    x = np.linspace(-(Xt + extra), Xt + extra, 2001)
    res = osc_density(OscConfig(eta), x)
    inner = np.abs(x) < Xt
    l1 = float(np.trapezoid(np.abs(res.density - newtonian_density(eta, x))[inner], x[inner]))
    return x, res, l1


def _build_density(spec, tol):
    ds = _new(spec, tol)
    eta = spec.params["eta"]
    x, res, l1 = _density(eta, spec.params["extra"])
    ds.add("quasi-newtonian", x=x, density=res.density)
    inner = np.abs(x) < math.sqrt(2 * eta + 1)
    ds.add("newtonian", x=x[inner], density=newtonian_density(eta, x[inner]))
    if eta == 0:
        ds.add("psi*psi", x=x, density=ground_state_density(x))
    ds.metadata["tail_fraction"] = res.tail_fraction
    ds.metadata["l1_inside_turning_points"] = l1
    return ds


def _check_density(ds):
    from scipy import integrate

    out: List[str] = []
    s = ds["quasi-newtonian"]
    total = float(integrate.simpson(s["density"], x=s["x"]))
    _fail(abs(total - 1.0) < 1e-6, "density integrates to %r" % total, out)
    _fail(bool(np.all(s["density"] >= 0)), "negative density", out)
    if ds.metadata["param.eta"] == 0:
        i = int(np.argmin(np.abs(s["x"] - 2.0)))
        _fail(s["density"][i] > 0, "density vanishes beyond the turning point", out)
    else:
        _fail(ds.metadata["l1_inside_turning_points"] < _density(0.0)[2], "density no closer to Newtonian than at eta=0",
              out)
    return out


def _omega_grid():
    return np.round(np.concatenate(([-0.49, -0.45], np.arange(-0.4, 12.0001, 0.1))), 10)


def _build_fig13(spec, tol):
    ds = _new(spec, tol)
    etas = _omega_grid()
    w = np.array([omega_ratio(OscConfig(float(e)), rtol=tol) for e in etas])
    ds.add("quasi-newtonian", eta=etas, omega_ratio=w)
    ds.add("newtonian", eta=etas, omega_ratio=np.ones_like(etas))
    return ds


def _check_fig13(ds):
    out: List[str] = []
    s = ds["quasi-newtonian"]
    eta, w = s["eta"], s["omega_ratio"]
    _fail(bool(np.all(w > 0)), "non-positive omega ratio", out)
    # rises steeply from zero energy, then oscillates about 1 with period 2 in eta
    low = eta <= 0.4
    _fail(bool(np.all(np.diff(w[low]) > 0)), "omega ratio not increasing near zero energy", out)
    _fail(bool(np.all(np.abs(w[eta >= 2] - 1.0) < 0.02)), "omega ratio strays from 1 at eta >= 2", out)
    return out


def _build_fig17(spec, tol):
    ds = _new(spec, tol)
    etas = np.concatenate(([-0.5], _omega_grid()))
    J = np.array([0.0 if e == -0.5 else full_cycle_action(OscConfig(float(e))) for e in etas])
    ds.add("quasi-newtonian", eta=etas, J=J)
    ds.add("newtonian", eta=etas, J=etas + 0.5)
    return ds


def _check_fig17(ds):
    out: List[str] = []
    s = ds["quasi-newtonian"]
    eta, J = s["eta"], s["J"]
    _fail(J[0] == 0.0, "J(-1/2) != 0", out)
    _fail(bool(np.all(np.diff(J) > 0)), "J not increasing", out)
    hi = eta >= 2
    _fail(bool(np.all(np.abs(J[hi] - (eta[hi] + 1)) < 0.05)), "J differs from h(eta + 1) by more than .05h", out)
    return out


def _build_fig20(spec, tol):
    ds = _new(spec, tol)
    eta = spec.params["eta"]
    x = _osc_x(eta)
    for a in spec.params["a"]:
        cfg = OscConfig(eta, a=a)
        _, _, t = osc_dynamics_grid(cfg, x)
        ds.add("a=%g" % a, x=x, t=t / TWO_PI)
        tau = osc_period(cfg, rtol=tol)
        frames = sweep(osc_world_line(cfg), -0.9 * tau / 4, 0.9 * tau / 4, spec.params["frames"],
                       m=1.0, E=cfg.energy, half_width=cfg.turning_point + 2.0, max_half_width=24.0,
                       samples_per_unit=100.0)
        ds.add("counts a=%g" % a, t_star=np.array([f.t_star for f in frames]) / TWO_PI,
               count=np.array([f.count if f.valid else np.nan for f in frames], dtype=float))
        ds.metadata["period.a=%g" % a] = tau
    _newtonian_series(ds, eta, what="t")
    return ds


def _check_fig20(ds):
    out: List[str] = []
    for a in ds.metadata["param.a"]:
        c = ds["counts a=%g" % a]["count"]
        _fail(bool(np.all(np.isfinite(c))), "a=%g: some snapshot frames failed" % a, out)
        c = c[np.isfinite(c)]
        _fail(bool(np.all(np.mod(c, 2) == 1)), "a=%g: even point count" % a, out)
    c = ds["counts a=0.1"]["count"]
    _fail(bool(np.nanmax(c) > 1), "a=0.1: no multiple-point frames", out)
    return out


def _build_scan(spec, tol):
    ds = _new(spec, tol)
    lo, hi, n = spec.params["eta_range"]
    for a in spec.params["a"]:
        r = quantization_scan(a, lo, hi, n)
        ds.add("a=%g" % a, eta=r.eta, J=r.J)
        ds.add("steps a=%g" % a, eta=np.array([s.eta for s in r.steps]),
               size=np.array([s.size for s in r.steps]),
               parity=np.array([PARITY_CODE[s.parity] for s in r.steps]))
    ds.add("newtonian", eta=np.array([lo, hi]), J=np.array([lo, hi]) + 0.5)
    ds.units.update({"size": "h", "parity": "-1 zero-point, 0 even, 1 odd"})
    return ds


def _steps_match(s, expected, sizes, out, label):
    eta, size = s["eta"], s["size"]
    _fail(len(eta) == len(expected), "%s: found %d steps, expected %d" % (label, len(eta), len(expected)), out)
    if len(eta) == len(expected):
        _fail(bool(np.all(np.abs(eta - expected) <= 0.05)), "%s: step locations %s" % (label, np.round(eta, 3)), out)
        _fail(bool(np.all(np.abs(size - sizes) <= 0.1 * sizes)), "%s: step sizes %s" % (label, np.round(size, 3)), out)


def _check_fig21(ds):
    out: List[str] = []
    _steps_match(ds["steps a=0.005"], np.array([0.0, 2.0, 4.0, 6.0]), np.full(4, 2.0), out, "a=0.005")
    _steps_match(ds["steps a=200"], np.array([-0.5, 1.0, 3.0, 5.0]), np.array([1.0, 2.0, 2.0, 2.0]), out, "a=200")
    return out


def _check_fig26(ds):
    out: List[str] = []
    for a in ds.metadata["param.a"]:
        J = ds["a=%g" % a]["J"]
        _fail(J[0] == 0.0, "a=%g: J(-1/2) != 0" % a, out)
        _fail(bool(np.all(np.diff(J) > -1e-9)), "a=%g: J decreases" % a, out)
        _fail(bool(np.all(np.isfinite(J))), "a=%g: non-finite J" % a, out)
    return out


def _build_transition(spec, tol):
    ds = _new(spec, tol)
    eta, a = spec.params["eta"], spec.params["a"]
    cfg = OscConfig(eta, a=a)
    x = _osc_x(eta, 4.0, 1601)
    W, _, _ = osc_dynamics_grid(cfg, x)
    ds.add("a=%g" % a, x=x, W=W / TWO_PI)
    _newtonian_series(ds, eta)
    steps = action_step_positions(cfg)
    ds.add("steps", x=steps)
    ds.metadata["J"] = full_cycle_action(cfg)
    return ds


def _check_transition(ds):
    out: List[str] = []
    s = ds.series[0]
    _fail(bool(np.all(np.diff(s["W"]) > -1e-12)), "action decreasing", out)
    expected = ds.metadata["param.expected_steps"]
    if expected is not None:
        n = len(ds["steps"])
        _fail(n == expected, "found %d action steps, expected %d" % (n, expected), out)
    else:
        _fail(abs(ds.metadata["J"] - round(ds.metadata["J"])) < 0.05, "J not on a plateau mid-transition", out)
    return out


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


def _spec(fig_id, title, system, params, build, check, units):
    return FigureSpec(fig_id, title, system, params, build, check, units)


_CATAN_UNITS = {"x": "rad", "y": "rad"}

REGISTRY: Dict[int, FigureSpec] = {}


def _register(*specs):
    for s in specs:
        REGISTRY[s.fig_id] = s


_register(
    _spec(1, "catan staircase", "catan", {"a": 0.02}, _build_staircase, _check_staircase, _CATAN_UNITS),
    _spec(2, "shifted catan staircase", "catan", {"a": 50.0}, _build_staircase, _check_staircase, _CATAN_UNITS),
    _spec(3, "free clustor action", "free", {"A": [0.378, 0.022]}, _build_free_action, _check_free_action,
          FREE_UNITS),
    _spec(4, "free clustor momentum", "free", {"A": [0.378, 0.022]}, _build_free_momentum, _check_free_momentum,
          FREE_UNITS),
    _spec(5, "free clustor world-line, alpha1 = .75", "free",
          {"A": 0.378, "t_star": 4.5, "x_max": 6.0 * math.pi, "window": None},
          _build_free_world_line, _check_fig5, FREE_UNITS),
    _spec(6, "free clustor world-line, alpha1 = .999", "free",
          {"A": 0.022, "t_star": 320.0, "x_max": 8.0 * math.pi, "window": [0.0, 8.0 * math.pi]},
          _build_free_world_line, _check_fig6, FREE_UNITS),
    _spec(7, "free clustor world-line, alpha1 = 0, alpha2 = 5", "free",
          {"C": 0.0, "D": 10.0, "t_from": 0.0, "t_to": 40.0, "frames": 161},
          _build_fig7, _check_fig7, FREE_UNITS),
    _spec(8, "barrier encounter action", "barrier", {"V_over_E": 0.99, "x1": 2.0, "x2": 3.0},
          _build_fig8, _check_fig8, dict(FREE_UNITS)),
    _spec(9, "quasi-Newtonian action, eta = 0", "oscillator", {"eta": 0.0, "a": [1.0], "quantity": "W"},
          _build_osc_curve, _check_osc_curve, OSC_UNITS),
    _spec(10, "quasi-Newtonian action, eta = 12", "oscillator", {"eta": 12.0, "a": [1.0], "quantity": "W"},
          _build_osc_curve, _check_osc_curve, OSC_UNITS),
    _spec(11, "quasi-Newtonian momentum, eta = 0", "oscillator", {"eta": 0.0, "a": [1.0], "quantity": "p"},
          _build_osc_curve, _check_osc_curve, OSC_UNITS),
    _spec(12, "quasi-Newtonian momentum, eta = 12", "oscillator", {"eta": 12.0, "a": [1.0], "quantity": "p"},
          _build_osc_curve, _check_osc_curve, OSC_UNITS),
    _spec(13, "frequency ratio", "oscillator", {}, _build_fig13, _check_fig13, OSC_UNITS),
    _spec(14, "quasi-Newtonian world-lines", "oscillator", {"eta": [0.0, 12.0]}, _build_osc_world_lines,
          _check_osc_world_lines, OSC_UNITS),
    _spec(15, "position density, eta = 0", "oscillator", {"eta": 0.0, "extra": 5.0}, _build_density,
          _check_density, OSC_UNITS),
    _spec(16, "position density, eta = 12", "oscillator", {"eta": 12.0, "extra": 5.0}, _build_density,
          _check_density, OSC_UNITS),
    _spec(17, "quasi-Newtonian full-cycle action", "oscillator", {}, _build_fig17, _check_fig17, OSC_UNITS),
    _spec(18, "activated action, eta = 12", "oscillator", {"eta": 12.0, "a": [0.8, 0.1], "quantity": "W"},
          _build_osc_curve, _check_osc_curve, OSC_UNITS),
    _spec(19, "activated momentum, eta = 12", "oscillator", {"eta": 12.0, "a": [0.8, 0.1], "quantity": "p"},
          _build_osc_curve, _check_osc_curve, OSC_UNITS),
    _spec(20, "activated world-lines, eta = 12", "oscillator", {"eta": 12.0, "a": [0.8, 0.1], "frames": 21},
          _build_fig20, _check_fig20, OSC_UNITS),
    _spec(21, "full-cycle action, high activation", "oscillator",
          {"a": [0.005, 200.0], "eta_range": [-0.5, 6.5, 400]}, _build_scan, _check_fig21, OSC_UNITS),
    _spec(22, "action below the eta = 4 transition", "oscillator",
          {"eta": 3.99, "a": 1e-4, "expected_steps": 4}, _build_transition, _check_transition, OSC_UNITS),
    _spec(23, "action at the eta = 4 transition", "oscillator",
          {"eta": 4.0, "a": 1e-4, "expected_steps": None}, _build_transition, _check_transition, OSC_UNITS),
    _spec(24, "action above the eta = 4 transition", "oscillator",
          {"eta": 4.01, "a": 1e-4, "expected_steps": 6}, _build_transition, _check_transition, OSC_UNITS),
    _spec(25, "action below the eta = 6 transition", "oscillator",
          {"eta": 5.99, "a": 1e-4, "expected_steps": 6}, _build_transition, _check_transition, OSC_UNITS),
    _spec(26, "full-cycle action, moderate activation", "oscillator",
          {"a": [0.25, 4.0], "eta_range": [-0.5, 6.5, 200]}, _build_scan, _check_fig26, OSC_UNITS),
)

def figure_ids() -> List[int]:
    return sorted(REGISTRY)


def _get(fig_id: int) -> FigureSpec:
    try:
        return REGISTRY[int(fig_id)]
    except (KeyError, ValueError, TypeError):
        raise UnknownFigure("no figure %r; valid ids are 1..%d" % (fig_id, len(REGISTRY))) from None


def build_figure(fig_id: int, tol: float = 1e-8) -> Dataset:
    """Dataset of figure ``fig_id``; ``tol`` is the relative tolerance of limit evaluations."""
    spec = _get(fig_id)
    return spec.build(spec, tol)


def check_figure(ds: Dataset) -> List[str]:
    """Invariant violations of a figure dataset (empty when it passes)."""
    return _get(int(ds.metadata["figure"])).check(ds)
