"""Discretely extended objects (clustors) in one dimension.

Subpackages by system: :mod:`clustor.free`, :mod:`clustor.barrier` and
:mod:`clustor.oscillator`, built on the generic kinematics in
:mod:`clustor.kinematics` and the special functions in
:mod:`clustor.specfun`.  :mod:`clustor.points` extracts clustor points
from any world-line and :mod:`clustor.cli` emits figure datasets.
"""

__version__ = "0.1.0"

from .errors import ClustorError, NumericalError, ValidationError  # noqa: E402
from .free import FreeConfig  # noqa: E402
from .barrier import BarrierConfig  # noqa: E402
from .oscillator import OscConfig  # noqa: E402

__all__ = ["__version__", "ClustorError", "NumericalError", "ValidationError", "FreeConfig", "BarrierConfig",
           "OscConfig"]
