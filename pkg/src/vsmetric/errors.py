"""Exception hierarchy shared by every module in the package."""


class VSMetricError(Exception):
    """Base class for all errors raised by vsmetric."""


class DimensionError(VSMetricError, ValueError):
    """Operands live in different lattice spaces or have the wrong shape."""


class DomainError(VSMetricError, ValueError):
    """A point lies outside the domain an operation is defined on."""


class ParameterError(VSMetricError, ValueError):
    """A numeric parameter is out of range (negative, non-finite, infeasible)."""


class RangeContainmentError(VSMetricError):
    """A value produced by p or q has no preimage under k."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class UnsupportedLatticeError(VSMetricError):
    """The operation only supports scalar-valued metrics."""
