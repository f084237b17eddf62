"""Domain-specific exception types.

Every error raised by this package derives from :class:`SSPError`, so callers
(and the CLI) can distinguish domain failures from programming errors.
"""


class SSPError(Exception):
    """Base class for all domain errors raised by this package."""


class DimensionMismatch(SSPError):
    """Coefficient matrices have incompatible shapes."""


class UnsupportedOrder(SSPError):
    """Order conditions requested beyond the implemented range (p <= 4)."""


class NotThirdOrder(SSPError):
    """Operation requires a method that satisfies the third order conditions."""


class InvalidRange(SSPError):
    """Degenerate axis range for a sampling grid."""


class SingularSystem(SSPError):
    """A triangular solve hit a vanishing pivot."""


class NotAbsolutelyMonotonic(SSPError):
    """Method is infeasible for every positive radius (negative coefficients)."""


class NegativeCoefficients(SSPError):
    """A representation has negative entries where nonnegativity is required."""


class InfeasibleRadius(SSPError):
    """Requested radius lies outside the absolutely monotonic interval."""


class ZeroPivot(SSPError):
    """Subdiagonal pivot vanishes while lower entries in its column do not."""


class NotCanonical(SSPError):
    """Representation is not canonical (first stage must copy the input state)."""


class UnsupportedClass(SSPError):
    """No register template exists for this storage class."""


class DegenerateWeights(SSPError):
    """Weights that appear in denominators are (numerically) zero."""


class MonotonicityViolation(SSPError):
    """Column multipliers violate the ordering u >= v >= w >= x >= 1."""


class OrderViolation(SSPError):
    """Parameters do not satisfy the order conditions required here."""


class NoFeasiblePoint(SSPError):
    """Optimizer failed to find any feasible point at the bracket's low end."""


class UnknownMethod(SSPError):
    """Method id not present in the catalog."""


class EmptyGrid(SSPError):
    """Step-size sweep grid contains no points."""


class NonFiniteState(SSPError):
    """Time integration produced non-finite state values."""
