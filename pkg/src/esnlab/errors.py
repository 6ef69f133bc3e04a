"""Exception types shared across the library."""


class EsnLabError(Exception):
    """Base class for every error raised by esnlab."""


class InvalidInputError(EsnLabError, ValueError):
    """An argument violates a documented precondition."""


class DimensionMismatchError(InvalidInputError):
    """Matrix/vector shapes are inconsistent with each other."""


class SingularSystemError(EsnLabError, ValueError):
    """A linear system is numerically singular; regularize with mu > 0."""


class CannotRescaleError(EsnLabError, ValueError):
    """The requested rescaling target is unreachable (e.g. nilpotent matrix)."""


class DivergenceError(EsnLabError, RuntimeError):
    """A generated recursion left its admissible range."""


class UncertifiedReservoirError(EsnLabError, ValueError):
    """An analysis requires a contraction certificate that does not hold."""
