import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial.hermite import hermval
from scipy import special

from clustor.errors import NonConvergentUnwrap, SeriesOverflow, ValidationError
from clustor.specfun import (
    KummerParams,
    PhaseTrack,
    catan_eval,
    digamma_difference,
    kummer_m,
    kummer_m_and_ma,
    kummer_ma,
    kummer_mz,
    kummer_mza,
    pochhammer_digamma,
    unwrap_phase,
)


# --- cumulative arctangent -------------------------------------------------


def test_catan_identity_accumulates_past_branch():
    for x in (0.3, 1.7, 4.0, 9.5, 31.0):
        assert catan_eval(np.sin, np.cos, 0.0, x) == pytest.approx(x, abs=1e-12)


def test_catan_negative_direction():
    assert catan_eval(np.sin, np.cos, 0.0, -7.25) == pytest.approx(-7.25, abs=1e-12)


def test_track_continues_angle():
    tr = PhaseTrack()
    catan_eval(np.sin, np.cos, 0.0, 3.0, tr)
    assert tr.winding == 1
    v = catan_eval(np.sin, np.cos, 3.0, 6.5, tr)
    assert v == pytest.approx(6.5, abs=1e-12)
    tr.reset()
    assert tr.x is None


def test_unwrap_half_turn_per_pi():
    # tan(W) = a tan(x) has the same half-turn count as x itself
    xs = np.linspace(0.0, 10 * math.pi, 400)

    def pair(u):
        return 0.02 * np.sin(u), np.cos(u)

    g = unwrap_phase(pair, xs, track=PhaseTrack(), max_step=0.05)
    at_pi = unwrap_phase(pair, np.arange(0, 11) * math.pi, track=PhaseTrack(), max_step=0.05)
    assert np.allclose(at_pi, np.arange(0, 11) * math.pi, atol=1e-12)
    assert np.all(np.diff(g) >= 0)


def test_unwrap_vanishing_pair_raises():
    def pair(u):
        return np.zeros_like(u), np.zeros_like(u)

    with pytest.raises(NonConvergentUnwrap):
        unwrap_phase(pair, np.array([0.0, 1.0]))


# --- Kummer M ---------------------------------------------------------------


@pytest.mark.parametrize("a,b,z", [
    (0.5, 0.5, 1.0), (-0.25, 0.5, 3.0), (-3.0, 1.5, 7.0), (1.75, 1.5, 20.0),
    (-5.3, 0.5, 12.0), (0.1, 2.5, 0.0), (-0.75, 0.5, 40.0),
])
def test_kummer_against_scipy(a, b, z):
    assert kummer_m(a, b, z) == pytest.approx(special.hyp1f1(a, b, z), rel=1e-10)


def test_kummer_params_object_and_validation():
    assert kummer_m(KummerParams(0.3, 1.5, 2.0)) == pytest.approx(special.hyp1f1(0.3, 1.5, 2.0), rel=1e-12)
    with pytest.raises(ValidationError):
        KummerParams(0.3, -2.0, 1.0)
    with pytest.raises(ValidationError):
        KummerParams(0.3, 1.5, -1.0)


def test_kummer_guard_and_scaled_range():
    with pytest.raises(SeriesOverflow):
        kummer_m(0.25, 0.5, 901.0)
    v = kummer_m(-0.3, 0.5, 880.0, scaled=True)
    assert np.isfinite(v)
    # exp(-z) M(a,b,z) ~ Gamma(b)/Gamma(a) z^(a-b) for large z
    ref = special.gamma(0.5) / special.gamma(-0.3) * 880.0 ** (-0.8)
    assert v == pytest.approx(ref, rel=2e-3)


def test_kummer_vectorized_shape():
    z = np.linspace(0, 30, 12).reshape(3, 4)
    out = kummer_m(-1.2, 0.5, z)
    assert out.shape == (3, 4)
    assert np.allclose(out, special.hyp1f1(-1.2, 0.5, z), rtol=1e-10)


def _fd(f, v, h):
    return (f(v + h) - f(v - h)) / (2 * h)


@pytest.mark.parametrize("a,b,z", [(-0.7, 0.5, 2.3), (0.4, 1.5, 5.0), (-2.0, 0.5, 3.0), (-3.5, 1.5, 9.0)])
def test_derivatives_match_finite_differences(a, b, z):
    h = 1e-5
    mz = kummer_mz(a, b, z)
    ma = kummer_ma(a, b, z)
    mza = kummer_mza(a, b, z)
    assert mz == pytest.approx(_fd(lambda q: kummer_m(a, b, q), z, h), rel=1e-6)
    assert ma == pytest.approx(_fd(lambda q: kummer_m(q, b, z), a, h), rel=1e-6)
    assert mza == pytest.approx(_fd(lambda q: kummer_mz(q, b, z), a, h), rel=1e-6)


def test_m_and_ma_consistent_with_parts():
    m, ma = kummer_m_and_ma(-1.3, 0.5, 4.0)
    assert m == pytest.approx(kummer_m(-1.3, 0.5, 4.0), rel=1e-14)
    assert ma == pytest.approx(kummer_ma(-1.3, 0.5, 4.0), rel=1e-14)


def test_kummer_tiny_a_keeps_its_terms():
    # a + 1 - 1 rounds to zero for tiny a; the term recurrence must not
    # (mpmath, 40 digits: 1.0000000249025598744855732)
    got = kummer_m(6.756778430301264e-18, 0.5, 23.0)
    assert got - 1.0 == pytest.approx(2.49025598744855732e-08, rel=1e-4)


@settings(max_examples=60, deadline=None)
@given(a=st.floats(-6.0, 3.0), z=st.floats(0.0, 25.0), b=st.sampled_from([0.5, 1.5]))
def test_kummer_property_matches_scipy(a, b, z):
    ref = special.hyp1f1(a, b, z)
    got = kummer_m(a, b, z)
    scale = max(abs(ref), special.hyp1f1(abs(a), b, z) * 1e-12, 1e-300)
    assert abs(got - ref) <= 1e-8 * scale


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-4.0, 2.0), z=st.floats(0.1, 15.0))
def test_kummer_z_derivative_property(a, z):
    h = 1e-5 * max(1.0, z)
    fd = _fd(lambda q: kummer_m(a, 0.5, q), z, h)
    got = kummer_mz(a, 0.5, z)
    assert abs(got - fd) <= 1e-6 * max(abs(fd), abs(kummer_m(a, 0.5, z)), 1e-8)


# --- Hermite reduction ------------------------------------------------------


def _hermite_from_kummer(n, x):
    m = n // 2
    if n % 2 == 0:
        return (-1) ** m * math.factorial(n) / math.factorial(m) * kummer_m(-m, 0.5, x * x)
    return (-1) ** m * math.factorial(n) / math.factorial(m) * 2 * x * kummer_m(-m, 1.5, x * x)


@pytest.mark.parametrize("n", range(0, 11))
def test_hermite_reduction_at_integer(n):
    x = np.linspace(-4.0, 4.0, 41)
    coef = np.zeros(n + 1)
    coef[n] = 1.0
    ref = hermval(x, coef)
    got = _hermite_from_kummer(n, x)
    scale = np.max(np.abs(ref))
    assert np.max(np.abs(got - ref)) <= 1e-10 * scale


# --- digamma pieces ---------------------------------------------------------


@pytest.mark.parametrize("a,n", [(0.3, 5), (-2.5, 4), (1.7, 12), (-0.25, 1)])
def test_digamma_difference_vs_scipy(a, n):
    ref = special.digamma(a + n) - special.digamma(a)
    assert digamma_difference(a, n) == pytest.approx(ref, rel=1e-12)


def test_digamma_difference_pole():
    with pytest.raises(ValidationError):
        digamma_difference(-2.0, 4)


@pytest.mark.parametrize("a,n", [(0.3, 5), (-2.5, 4), (1.1, 7)])
def test_pochhammer_digamma_product_form(a, n):
    ref = special.poch(a, n) * (special.digamma(a + n) - special.digamma(a))
    assert pochhammer_digamma(a, n) == pytest.approx(ref, rel=1e-11)


def test_pochhammer_digamma_finite_at_nonpositive_integer():
    # (a)_n has a simple zero at a = -2 cancelling the pole of the harmonic sum;
    # the limit is the product of the other factors, prod_{j != 2} (-2 + j)
    val = pochhammer_digamma(-2.0, 5)
    assert val == pytest.approx((-2.0) * (-1.0) * 1.0 * 2.0, rel=1e-14)
    eps = 1e-7
    fd = special.poch(-2.0 + eps, 5) * (special.digamma(3.0 + eps) - special.digamma(-2.0 + eps))
    assert val == pytest.approx(fd, rel=1e-5)
