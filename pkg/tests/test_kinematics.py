import math

import numpy as np
import pytest

from clustor.errors import BranchCrossing, GridTooCoarse, NonzeroPotentialAtReference, ValidationError
from clustor.free import FreeConfig, free_basis, free_dynamics_grid
from clustor.kinematics import (
    ReferenceData,
    action_grid,
    current_momentum,
    energy_residual,
    initial_values,
    invert_branch,
    momentum_at,
    motion_residual,
    quasi_newtonian_ref,
    third_order_residual,
    time_at,
    time_slope_at,
    velocity_at,
)

CONFIGS = [
    FreeConfig(A=1.0),
    FreeConfig(A=0.378),
    FreeConfig(A=2.4, B=0.3, C=-0.2, D=0.7),
    FreeConfig(m=2.0, E=3.0, A=0.6, B=-0.4, C=1.5, D=-2.0, hbar=0.7),
]


@pytest.fixture(params=range(len(CONFIGS)))
def cfg(request):
    return CONFIGS[request.param]


def _x(cfg, n=401):
    return np.linspace(-1.3 * cfg.wavelength, 2.1 * cfg.wavelength, n)


def test_generic_route_matches_closed_free(cfg):
    x = _x(cfg)
    ref = cfg.reference()
    basis = free_basis(cfg)
    W, p, t = free_dynamics_grid(cfg, x)
    b = basis(x)
    assert np.allclose(momentum_at(b, ref, cfg.hbar), p, rtol=1e-12, atol=0)
    assert np.allclose(time_at(b, ref, cfg.hbar), t, rtol=1e-10, atol=1e-12 * cfg.time_unit)
    Wg = action_grid(basis, ref, x, hbar=cfg.hbar, max_step=cfg.wavelength / 32)
    assert np.allclose(Wg, W, rtol=0, atol=1e-10 * cfg.h)


def test_reference_values_reproduced(cfg):
    ref = cfg.reference()
    b = free_basis(cfg)(np.array([0.0]))
    assert momentum_at(b, ref, cfg.hbar)[0] == pytest.approx(ref.p0, rel=1e-14)
    assert time_at(b, ref, cfg.hbar)[0] == pytest.approx(0.0, abs=1e-14)
    assert time_slope_at(b, ref, cfg.hbar)[0] == pytest.approx(ref.tx0, rel=1e-12)


def test_swap_and_rescale_invariance(cfg):
    x = _x(cfg, 101)
    ref = cfg.reference()
    b = free_basis(cfg)(x)
    p, t = momentum_at(b, ref, cfg.hbar), time_at(b, ref, cfg.hbar)
    for other in (b.swapped(), b.scaled(3.7), b.scaled(-0.01), b.swapped().scaled(1e5)):
        assert np.allclose(momentum_at(other, ref, cfg.hbar), p, rtol=1e-13, atol=0)
        assert np.allclose(time_at(other, ref, cfg.hbar), t, rtol=1e-12, atol=1e-13 * cfg.time_unit)


def test_current_identity(cfg):
    x = _x(cfg, 201)
    ref = cfg.reference()
    b = free_basis(cfg)(x)
    assert np.allclose(current_momentum(b, ref, cfg.hbar), momentum_at(b, ref, cfg.hbar), rtol=1e-12)


def test_p_is_action_slope(cfg):
    x = np.linspace(0.1, 0.9, 9) * cfg.wavelength
    h = 1e-5 * cfg.wavelength
    W_plus = free_dynamics_grid(cfg, x + h)[0]
    W_minus = free_dynamics_grid(cfg, x - h)[0]
    p = free_dynamics_grid(cfg, x)[1]
    assert np.allclose((W_plus - W_minus) / (2 * h), p, rtol=1e-6)


def test_time_slope_is_energy_derivative_of_momentum(cfg):
    # independent check: rebuild the config at E +- dE keeping p0, px0, tx0, txx0 on their E-lines
    x = np.linspace(-0.4, 0.7, 12) * cfg.wavelength
    ref = cfg.reference()
    tx = time_slope_at(free_basis(cfg)(x), ref, cfg.hbar)
    dE = 1e-6 * cfg.E

    def p_at(E):
        r = ReferenceData(E, 0.0, ref.p0 + ref.tx0 * (E - cfg.E), ref.px0 + ref.txx0 * (E - cfg.E), ref.tx0, ref.txx0)
        c = FreeConfig.from_reference(r, cfg.m, cfg.hbar)
        return momentum_at(free_basis(c)(x), r, cfg.hbar)

    fd = (p_at(cfg.E + dE) - p_at(cfg.E - dE)) / (2 * dE)
    assert np.allclose(tx, fd, rtol=1e-5, atol=1e-7 * abs(ref.tx0))


def test_energy_residual_small_and_refines(cfg):
    ref = cfg.reference()
    res = []
    for n in (2001, 4001, 8001):
        x = np.linspace(0.0, cfg.wavelength, n)
        p = free_dynamics_grid(cfg, x)[1]
        res.append(energy_residual(x, p, lambda s: 0.0 * s, cfg.m, ref, cfg.hbar))
    assert res[-1] < 1e-5 * cfg.E
    # refinement lowers the residual until it reaches the rounding floor
    assert res[2] < res[0] or res[0] < 1e-8 * cfg.E


def test_third_order_residual(cfg):
    x = np.linspace(0.0, cfg.wavelength, 8001)
    W = free_dynamics_grid(cfg, x)[0]
    assert third_order_residual(x, W, lambda s: 0.0 * s, cfg.m, cfg.E, cfg.hbar) < 1e-4


def test_energy_residual_grid_guard():
    cfg = CONFIGS[0]
    with pytest.raises(GridTooCoarse):
        energy_residual([0.0, 1.0, 2.0], [1.0, 1.0, 1.0], lambda s: 0.0 * s, cfg.m, cfg.reference())


def test_motion_residual_on_monotone_branch():
    cfg = FreeConfig(A=0.9, B=0.05, C=0.1, D=0.05)
    # keep the stretch from x = 0 up to the first turn of the world-line
    xs = np.linspace(0.0, 2.0 * cfg.wavelength, 4001)
    _, _, t = free_dynamics_grid(cfg, xs)
    stop = int(np.flatnonzero(np.diff(t) <= 0)[0])
    assert xs[stop] > 0.5 * cfg.wavelength
    tg = np.linspace(t[50], t[int(0.9 * stop)], 1201)
    from clustor.free import free_world_line

    xg = invert_branch(free_world_line(cfg), xs[0], xs[stop - 1], tg)
    pg = free_dynamics_grid(cfg, xg)[1]
    r1, r2 = motion_residual(tg, xg, pg, cfg.m, lambda s: 0.0 * s, cfg.hbar)
    assert r1 < 1e-4 and r2 < 1e-4


def test_motion_residual_rejects_turning_branch():
    t = np.linspace(0, 1, 50)
    with pytest.raises(BranchCrossing):
        motion_residual(t, np.sin(6 * t), np.ones_like(t), 1.0, lambda s: 0.0 * s)


def test_quasi_newtonian_reference():
    ref = quasi_newtonian_ref(0.0, 0.3, m=2.0, E=1.5)
    assert ref.p0 == pytest.approx(math.sqrt(6.0))
    assert ref.tx0 == pytest.approx(2.0 / math.sqrt(6.0))
    assert ref.px0 == pytest.approx(-0.3 * math.sqrt(2.0 / 3.0))
    with pytest.raises(NonzeroPotentialAtReference):
        quasi_newtonian_ref(0.1, 0.0, 1.0, 1.0)


def test_initial_values_match_world_line_derivatives():
    cfg = CONFIGS[2]
    ref = cfg.reference()
    h = 1e-3 * cfg.wavelength
    xs = np.array([-2 * h, -h, 0.0, h, 2 * h])
    _, p, t = free_dynamics_grid(cfg, xs)

    def d1(f):
        return (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)

    def d2(f):
        return (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)

    t_x, t_xx, p_x, p_xx = d1(t), d2(t), d1(p), d2(p)
    xdot, xddot, pdot, pddot = initial_values(ref, cfg.m, 0.0, cfg.hbar)
    assert xdot == pytest.approx(1.0 / t_x, rel=1e-6)
    assert xddot == pytest.approx(-t_xx / t_x**3, rel=1e-4)
    assert pdot == pytest.approx(p_x / t_x, rel=1e-6)
    assert pddot == pytest.approx((p_xx * t_x - p_x * t_xx) / t_x**3, rel=1e-4)


def test_velocity_is_inverse_slope():
    cfg = CONFIGS[1]
    x = np.linspace(0.0, cfg.wavelength, 7)
    b = free_basis(cfg)(x)
    ref = cfg.reference()
    assert np.allclose(velocity_at(b, ref) * time_slope_at(b, ref), 1.0)


def test_reference_validation():
    with pytest.raises(ValidationError):
        ReferenceData(1.0, 0.0, 0.0, 0.0, 1.0, 0.0)
