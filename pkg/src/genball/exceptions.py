"""Exception hierarchy."""


class GenballError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(GenballError, ValueError):
    """Array shape does not match the signature."""


class RankDeficientError(GenballError, ValueError):
    """A basis or frame is numerically rank deficient."""


class ConvergenceError(GenballError, RuntimeError):
    """An iterative routine failed to meet its residual target."""


class ClusteredSpectrumError(GenballError, ValueError):
    """Eigenvalues are too close to be grouped reliably."""


class NotSelfMapError(GenballError, ValueError):
    """The operation needs a linear self map and the input is not one."""


class PreconditionError(GenballError, ValueError):
    """Inputs violate a documented precondition."""


class InvariantViolation(GenballError, RuntimeError):
    """A mathematical invariant failed beyond tolerance.

    This signals either a numerical failure or an input outside the
    documented domain; it is never expected on valid data.
    """
