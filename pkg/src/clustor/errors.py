"""Exception hierarchy shared by all clustor modules."""


class ClustorError(Exception):
    """Base class for every numerical or validation failure in the package."""

    module = "clustor"


class ValidationError(ClustorError, ValueError):
    """A parameter violates the preconditions of the target operation."""


class NumericalError(ClustorError, ArithmeticError):
    """A computation could not reach its stated tolerance."""


class NonConvergentUnwrap(NumericalError):
    """Adaptive phase refinement hit its depth limit without resolving a step."""

    module = "specfun"


class SeriesOverflow(NumericalError):
    """A Kummer series would leave the representable floating-point range."""

    module = "specfun"


class DegenerateDenominator(NumericalError):
    """Both squared terms of the momentum/time denominator vanished."""

    module = "kinematics"


class NonzeroPotentialAtReference(ValidationError):
    """Quasi-Newtonian reference values need V(x0) = 0."""

    module = "kinematics"


class GridTooCoarse(NumericalError):
    """Finite-difference stencils on the supplied grid are not stable."""

    module = "kinematics"


class BranchCrossing(NumericalError):
    """A time window contains a turning point of the world-line."""

    module = "kinematics"


class QuadratureFailure(NumericalError):
    """Adaptive quadrature did not meet its error target."""

    module = "free"


class OutsideTurningPoints(ValidationError):
    """Newtonian oscillator functions are undefined outside the turning points."""

    module = "oscillator"


class NoConvergence(NumericalError):
    """A large-x limit did not settle before the series overflow guard."""

    module = "oscillator"


class NormalizationFailure(NumericalError):
    """The density tail could not be bounded below the requested fraction."""

    module = "oscillator"


class WindowNotClosed(NumericalError):
    """The x-window does not provably enclose every clustor point."""

    module = "points"


class RootCollision(NumericalError):
    """Two roots of t(x) - t* merged below the refinement resolution."""

    module = "points"


class ParityViolation(NumericalError):
    """A snapshot broke the odd-count / one-excess-positive rule."""

    module = "points"


class UnknownFigure(ValidationError):
    """Figure id outside the registry."""

    module = "cli"
