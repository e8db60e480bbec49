"""scikit-learn style wrappers.

Each estimator takes its physical parameters in ``__init__``, derives the
system quantities in ``fit`` and maps an (n, 1) array of positions to the
columns (W, p, t) in ``transform``.  They compose with sklearn tooling
(``get_params``, ``clone``, pipelines) but learn nothing from data; ``fit``
only validates parameters and caches derived values.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .barrier import BarrierConfig, barrier_action_grid, barrier_momentum, region3_activation
from .free import FreeConfig, free_activation, free_dynamics_grid
from .oscillator import TAU_N, OscConfig, osc_dynamics_grid, osc_period

__all__ = ["FreeClustor", "BarrierClustor", "OscillatorClustor"]


def _positions(X):
    X = check_array(X, ensure_2d=True, dtype=float)
    if X.shape[1] != 1:
        raise ValueError("expected a single column of positions, got shape %r" % (X.shape,))
    return X[:, 0]


class FreeClustor(TransformerMixin, BaseEstimator):
    """Free clustor with activation constants A, B, C, D.

    After ``fit``: ``config_``, ``activation_`` (alpha1, phi1, alpha2, phi2),
    ``wavelength_``.
    """

    def __init__(self, m=1.0, E=0.5, A=1.0, B=0.0, C=0.0, D=0.0, hbar=1.0):
        self.m = m
        self.E = E
        self.A = A
        self.B = B
        self.C = C
        self.D = D
        self.hbar = hbar

    def fit(self, X=None, y=None):
        self.config_ = FreeConfig(m=self.m, E=self.E, A=self.A, B=self.B, C=self.C, D=self.D, hbar=self.hbar)
        self.activation_ = free_activation(self.config_)
        self.wavelength_ = self.config_.wavelength
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        W, p, t = free_dynamics_grid(self.config_, _positions(X))
        return np.column_stack((W, p, t))


class BarrierClustor(TransformerMixin, BaseEstimator):
    """Free clustor meeting a rectangular barrier between x1 and x2.

    After ``fit``: ``config_`` and ``transmitted_activation_`` (the
    region-3 activation parameters).  ``transform`` returns (W, p) and,
    since the three-region time function is not defined here, a column of
    NaN for t so that the output shape matches the other estimators.
    """

    def __init__(self, m=1.0, E=0.5, V=0.0, x1=1.0, x2=2.0, A=1.0, B=0.0, C=0.0, D=0.0, hbar=1.0):
        self.m = m
        self.E = E
        self.V = V
        self.x1 = x1
        self.x2 = x2
        self.A = A
        self.B = B
        self.C = C
        self.D = D
        self.hbar = hbar

    def fit(self, X=None, y=None):
        self.config_ = BarrierConfig(m=self.m, E=self.E, V=self.V, x1=self.x1, x2=self.x2,
                                     A=self.A, B=self.B, C=self.C, D=self.D, hbar=self.hbar)
        self.transmitted_activation_ = region3_activation(self.config_)
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        x = _positions(X)
        W = barrier_action_grid(self.config_, x)
        p = barrier_momentum(self.config_, x)
        return np.column_stack((W, p, np.full_like(x, np.nan)))


class OscillatorClustor(TransformerMixin, BaseEstimator):
    """Harmonic-oscillator clustor in natural units.

    After ``fit``: ``config_``, ``period_`` and ``omega_ratio_``.
    """

    def __init__(self, eta=0.0, a=1.0, B=0.0, C=None, D=0.0):
        self.eta = eta
        self.a = a
        self.B = B
        self.C = C
        self.D = D

    def fit(self, X=None, y=None):
        self.config_ = OscConfig(eta=self.eta, a=self.a, B=self.B, C=self.C, D=self.D)
        self.period_ = osc_period(self.config_)
        self.omega_ratio_ = TAU_N / self.period_
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        W, p, t = osc_dynamics_grid(self.config_, _positions(X))
        return np.column_stack((W, p, t))
