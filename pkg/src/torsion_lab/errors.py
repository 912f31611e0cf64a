"""Exception hierarchy shared by all computational modules."""


class TorsionLabError(Exception):
    """Base class for every error raised by the package."""


class ModelError(TorsionLabError, ValueError):
    """Input data violates a structural precondition (shape, commutation, ...)."""


class NumericalError(TorsionLabError, ArithmeticError):
    """A numerical procedure failed or produced an inconsistent result."""


class BoundaryZeroError(NumericalError):
    """A zero of a polynomial system lies on (or too close to) a region boundary."""


class StabilizationError(NumericalError):
    """A limit procedure did not stabilize; ``tail`` holds the last iterates."""

    def __init__(self, message, tail=()):
        super().__init__(message)
        self.tail = list(tail)
