"""Acceptance criteria 1-10.

Each test carries a ``criterion`` marker; ``conftest.py`` prints one
PASS/FAIL line per criterion at the end of the run.  Tolerances and
runtime limits are the ones the criteria state.
"""

import math
import time

import numpy as np
import pytest
from numpy.polynomial.hermite import hermval
from scipy import special

from clustor.barrier import BarrierConfig, region3_activation
from clustor.figures import build_figure, check_figure, figure_ids
from clustor.free import FreeConfig, average_momentum, free_activation, free_basis, free_dynamics_grid, free_world_line
from clustor.io import dumps
from clustor.kinematics import energy_residual, momentum_at, time_at
from clustor.oscillator import (
    OscConfig,
    full_cycle_action,
    omega_ratio,
    osc_basis,
    osc_dynamics_grid,
    osc_world_line,
    quantization_scan,
)
from clustor.points import assign_mass_energy, auto_points, count_deltas, sweep
from clustor.specfun import kummer_m, kummer_ma, kummer_mz, kummer_mza

C = pytest.mark.criterion


def _random_free(rng):
    return FreeConfig(A=float(rng.uniform(0.05, 3.0)), B=float(rng.uniform(-1.0, 1.0)),
                      C=float(rng.uniform(-3.0, 3.0)), D=float(rng.uniform(-3.0, 3.0)),
                      m=float(rng.uniform(0.5, 2.0)), E=float(rng.uniform(0.2, 3.0)))


# --- 1 ----------------------------------------------------------------------


@C(1, "free activation round-trip (alpha1 anchors, < 1 ms)")
def test_c1_activation_anchors():
    t0 = time.perf_counter()
    reps = 1000
    for _ in range(reps):
        a = free_activation(FreeConfig(A=0.378, B=0.0)).alpha1
        b = free_activation(FreeConfig(A=0.022, B=0.0)).alpha1
    per_call = (time.perf_counter() - t0) / (2 * reps)
    assert abs(a - 0.750) <= 0.001
    assert abs(b - 0.999) <= 0.0005
    assert per_call < 1e-3


# --- 2 ----------------------------------------------------------------------


@C(2, "average momentum equals hbar k for 50 activated configs (1e-8, < 1 s)")
def test_c2_de_broglie_average():
    rng = np.random.default_rng(2)
    cfgs = [_random_free(rng) for _ in range(50)]
    t0 = time.perf_counter()
    worst = 0.0
    for cfg in cfgs:
        pbar = average_momentum(cfg, x_start=float(rng.uniform(-5, 5)))
        worst = max(worst, abs(pbar / (cfg.hbar * cfg.k) - 1.0))
    elapsed = time.perf_counter() - t0
    assert worst < 1e-8
    assert elapsed < 1.0


# --- 3 ----------------------------------------------------------------------


@C(3, "action staircase W(x + lambda/2) - W(x) = h/2 (1e-9 h, < 5 s)")
def test_c3_action_staircase():
    rng = np.random.default_rng(3)
    # alpha1 = 0.9999 needs A^2 = (1 - 0.9999) / (1 + 0.9999)
    strong = FreeConfig(A=math.sqrt(0.0001 / 1.9999))
    assert free_activation(strong).alpha1 == pytest.approx(0.9999, abs=1e-12)
    cases = [(strong, float(rng.uniform(-30, 30))) for _ in range(10)]
    cases += [(_random_free(rng), float(rng.uniform(-30, 30))) for _ in range(90)]
    t0 = time.perf_counter()
    worst = 0.0
    for cfg, x in cases:
        W = free_dynamics_grid(cfg, np.array([x, x + cfg.wavelength / 2]))[0]
        worst = max(worst, abs((W[1] - W[0]) - cfg.h / 2) / cfg.h)
    elapsed = time.perf_counter() - t0
    assert worst < 1e-9
    assert elapsed < 5.0


# --- 4 ----------------------------------------------------------------------


def _barrier_anchor():
    t0 = time.perf_counter()
    act = region3_activation(BarrierConfig.in_wavelengths(0.99, 2.0, 3.0))
    return act, time.perf_counter() - t0


@C(4, "barrier anchor alpha1 = .998 +- .001, alpha2 = 294.9 +- 1.0 (< 1 s)")
def test_c4_barrier_alpha1():
    act, elapsed = _barrier_anchor()
    assert abs(act.alpha1 - 0.998) <= 0.001
    assert elapsed < 1.0


@C(4, "barrier anchor alpha1 = .998 +- .001, alpha2 = 294.9 +- 1.0 (< 1 s)")
def test_c4_barrier_alpha2():
    act, _ = _barrier_anchor()
    assert abs(act.alpha2 - 294.9) <= 1.0, "alpha2 = %.3f" % act.alpha2


# --- 5 ----------------------------------------------------------------------


@C(5, "oscillator frequency anchors (< 30 s)")
def test_c5_frequency_anchors():
    t0 = time.perf_counter()
    w0 = omega_ratio(OscConfig(0.0))
    w12 = omega_ratio(OscConfig(12.0))
    elapsed = time.perf_counter() - t0
    assert abs(w0 - 0.90) <= 0.02
    assert abs(w12 - 1.00) <= 0.02
    assert elapsed < 30.0


@C(5, "oscillator frequency anchors (< 30 s)")
def test_c5_frequency_near_zero_point():
    w = omega_ratio(OscConfig(-0.49))
    assert w < 0.1, "omega(-0.49)/omega_N = %.4f" % w


# --- 6 ----------------------------------------------------------------------


@C(6, "quantization scans at a = .005 and a = 200 (< 10 min)")
def test_c6_quantization_scans():
    t0 = time.perf_counter()
    weak = quantization_scan(0.005, -0.5, 6.5, 400)
    strong = quantization_scan(200.0, -0.5, 6.5, 400)
    elapsed = time.perf_counter() - t0

    assert len(weak.steps) == 4
    for step, where in zip(weak.steps, (0.0, 2.0, 4.0, 6.0)):
        assert abs(step.eta - where) <= 0.05
        assert abs(step.size - 2.0) <= 0.2
        assert step.parity == "even"

    assert len(strong.steps) == 4
    zero, *odd = strong.steps
    assert abs(zero.eta + 0.5) <= 0.05 and zero.parity == "zero-point"
    assert abs(zero.size - 1.0) <= 0.1
    for step, where in zip(odd, (1.0, 3.0, 5.0)):
        assert abs(step.eta - where) <= 0.05
        assert step.parity == "odd"
        assert abs(step.size - 2.0) <= 0.2
    assert elapsed < 600.0


# --- 7 ----------------------------------------------------------------------


@C(7, "quasi-Newtonian full-cycle action J = h(eta + 1) +- .05 h (< 1 min)")
def test_c7_quasi_newtonian_action():
    t0 = time.perf_counter()
    for eta in (2.0, 6.0, 12.0):
        J = full_cycle_action(OscConfig(eta))
        # the Newtonian action is h(eta + 1/2); the clustor exceeds it by about h/2
        assert abs(J - (eta + 1.0)) <= 0.05
        assert abs(J - (eta + 0.5) - 0.5) <= 0.05
    assert time.perf_counter() - t0 < 60.0


# --- 8 ----------------------------------------------------------------------


def _osc_case(rng):
    cfg = OscConfig(float(rng.uniform(0.0, 6.0)), a=float(rng.uniform(0.3, 3.0)),
                    B=float(rng.uniform(-0.3, 0.3)), D=float(rng.uniform(-0.5, 0.5)))
    wl = osc_world_line(cfg)
    lim = wl(np.array([-1.0, 1.0]) * (cfg.turning_point + 10.0))
    ts = float(0.9 * rng.uniform(lim[0], lim[1]))
    kw = dict(half_width=cfg.turning_point + 2.0, max_half_width=24.0, samples_per_unit=100.0)
    return wl, ts, 1.0, cfg.energy, kw


@C(8, "snapshot parity suite: 200 snapshots, sweeps and the 5-point anchor (< 1 min)")
def test_c8_snapshot_parity_suite():
    rng = np.random.default_rng(8)
    t0 = time.perf_counter()
    for i in range(200):
        if i % 4 == 3:
            wl, ts, m, E, kw = _osc_case(rng)
        else:
            cfg = _random_free(rng)
            wl, ts, m, E = free_world_line(cfg), float(rng.uniform(-20, 40)) * cfg.time_unit, cfg.m, cfg.E
            kw = dict(half_width=cfg.wavelength / 2)
        snap = assign_mass_energy(auto_points(wl, ts, **kw), m, E)
        assert snap.count % 2 == 1
        assert snap.alternates()
        assert snap.total_mass == pytest.approx(m, rel=1e-12)
        assert snap.total_energy == pytest.approx(E, rel=1e-12)

    for _ in range(4):
        cfg = _random_free(rng)
        frames = sweep(free_world_line(cfg), 0.0, 20.0 * cfg.time_unit, 201, m=cfg.m, E=cfg.E,
                       half_width=cfg.wavelength / 2)
        assert all(f.valid for f in frames)
        assert set(count_deltas(frames).tolist()) <= {-2, 0, 2}

    anchor = FreeConfig(A=0.378)
    snap = assign_mass_energy(auto_points(free_world_line(anchor), 4.5 * anchor.time_unit), anchor.m, anchor.E)
    assert snap.count == 5
    assert time.perf_counter() - t0 < 60.0


# --- 9 ----------------------------------------------------------------------


@C(9, "invariant suites (< 2 min total)")
def test_c9_invariants():
    rng = np.random.default_rng(9)
    t0 = time.perf_counter()

    # energy equation: residual below 1e-5 E once the grid resolves the momentum peaks
    for _ in range(5):
        cfg = _random_free(rng)
        n, res = 4001, np.inf
        while res >= 1e-5 * cfg.E and n < 2_000_000:
            x = np.linspace(0.0, cfg.wavelength, n)
            p = free_dynamics_grid(cfg, x)[1]
            res = energy_residual(x, p, lambda s: 0.0 * s, cfg.m, cfg.reference(), cfg.hbar)
            n = 2 * n - 1
        assert res < 1e-5 * cfg.E
    for eta, a in ((0.0, 1.0), (3.3, 0.5), (7.0, 1.5)):
        cfg = OscConfig(eta, a=a)
        w = min(4.0, cfg.turning_point + 1.0)
        x = np.linspace(-w, w, 8001)
        p = osc_dynamics_grid(cfg, x)[1]
        assert energy_residual(x, p, lambda s: 0.5 * s * s, 1.0, cfg.reference()) < 1e-5 * cfg.energy

    # p = dW/dx
    for cfg, grid in ((_random_free(rng), free_dynamics_grid), (OscConfig(2.2, a=0.7), osc_dynamics_grid)):
        x = np.linspace(-2.0, 2.0, 21)
        h = 1e-6
        slope = (grid(cfg, x + h)[0] - grid(cfg, x - h)[0]) / (2 * h)
        p = grid(cfg, x)[1]
        assert np.max(np.abs(slope / p - 1.0)) < 1e-6

    # Kummer derivative identities
    for _ in range(20):
        a, b, z = float(rng.uniform(-4, 2)), float(rng.choice([0.5, 1.5])), float(rng.uniform(0.1, 12))
        h = 1e-5
        fd_z = (kummer_m(a, b, z + h) - kummer_m(a, b, z - h)) / (2 * h)
        fd_a = (kummer_m(a + h, b, z) - kummer_m(a - h, b, z)) / (2 * h)
        fd_za = (kummer_mz(a + h, b, z) - kummer_mz(a - h, b, z)) / (2 * h)
        for got, ref in ((kummer_mz(a, b, z), fd_z), (kummer_ma(a, b, z), fd_a), (kummer_mza(a, b, z), fd_za)):
            assert abs(got - ref) <= 1e-6 * max(abs(ref), abs(kummer_m(a, b, z)))

    # Hermite reduction at integer eta
    x = np.linspace(-4.0, 4.0, 33)
    for n in range(0, 9):
        m = n // 2
        coef = np.zeros(n + 1)
        coef[n] = 1.0
        ref = hermval(x, coef)
        if n % 2 == 0:
            got = (-1) ** m * math.factorial(n) / math.factorial(m) * kummer_m(-m, 0.5, x * x)
        else:
            got = (-1) ** m * math.factorial(n) / math.factorial(m) * 2 * x * kummer_m(-m, 1.5, x * x)
        assert np.max(np.abs(got - ref)) <= 1e-10 * np.max(np.abs(ref))
        assert special.eval_hermite(n, 1.3) == pytest.approx(hermval(1.3, coef), rel=1e-12)

    # basis swap and rescale
    for cfg, basis in ((_random_free(rng), None), (OscConfig(1.7, a=0.4, B=0.1), None)):
        if isinstance(cfg, FreeConfig):
            b = free_basis(cfg)(np.linspace(-3, 3, 41))
        else:
            b = osc_basis(cfg.eta, np.linspace(-3, 3, 41))
        ref = cfg.reference()
        p0, t0_ = momentum_at(b, ref), time_at(b, ref)
        for other in (b.swapped(), b.scaled(-2.5), b.swapped().scaled(1e-3)):
            assert np.max(np.abs(momentum_at(other, ref) - p0) / np.abs(p0)) < 1e-13
            assert np.max(np.abs(time_at(other, ref) - t0_)) < 1e-13 * max(1.0, np.max(np.abs(t0_)))

    assert time.perf_counter() - t0 < 120.0


# --- 10 ---------------------------------------------------------------------


@C(10, "figure registry: 26 ids build, pass their checks, byte-identical on repeat")
def test_c10_figure_registry():
    ids = figure_ids()
    assert ids == list(range(1, 27))
    problems = {}
    for n in ids:
        first = build_figure(n)
        issues = check_figure(first)
        if issues:
            problems[n] = issues
        again = build_figure(n)
        for fmt in ("csv", "json"):
            assert dumps(first, fmt) == dumps(again, fmt), "figure %d %s output differs between runs" % (n, fmt)
    assert not problems, problems
