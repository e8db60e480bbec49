import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from clustor.estimators import BarrierClustor, FreeClustor, OscillatorClustor
from clustor.free import FreeConfig, free_dynamics_grid
from clustor.oscillator import OscConfig, osc_dynamics_grid


def test_free_transform_matches_functional_api():
    est = FreeClustor(A=0.378, D=0.2).fit()
    x = np.linspace(0, 10, 21)
    out = est.transform(x[:, None])
    W, p, t = free_dynamics_grid(FreeConfig(A=0.378, D=0.2), x)
    assert np.allclose(out, np.column_stack((W, p, t)))
    assert est.activation_.alpha1 == pytest.approx(0.75, abs=1e-3)


def test_clone_and_params():
    est = OscillatorClustor(eta=2.0, a=0.5)
    c = clone(est)
    assert c.get_params() == est.get_params()
    c.set_params(eta=3.0)
    assert est.eta == 2.0


def test_not_fitted():
    with pytest.raises(NotFittedError):
        FreeClustor().transform(np.zeros((3, 1)))


def test_oscillator_fit_attributes():
    est = OscillatorClustor(eta=0.0).fit(np.zeros((1, 1)))
    assert est.omega_ratio_ == pytest.approx(np.sqrt(np.pi) / 2, rel=1e-10)
    x = np.linspace(-3, 3, 7)
    assert np.allclose(est.transform(x[:, None]), np.column_stack(osc_dynamics_grid(OscConfig(0.0), x)))


def test_barrier_shape_and_nan_time():
    est = BarrierClustor(V=0.3, x1=2.0, x2=3.0).fit()
    out = est.fit_transform(np.linspace(0, 5, 11)[:, None])
    assert out.shape == (11, 3)
    assert np.all(np.isnan(out[:, 2]))


def test_rejects_multi_column_input():
    with pytest.raises(ValueError):
        FreeClustor().fit().transform(np.zeros((4, 2)))


def test_pipeline_composition():
    pipe = make_pipeline(FreeClustor(A=2.0))
    assert pipe.fit_transform(np.array([[0.0], [1.0]])).shape == (2, 3)
