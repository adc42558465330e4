"""Exception hierarchy shared by all modules."""


class JensenGapError(ValueError):
    """Base class for every error raised by this package."""


class DiscontinuityInside(JensenGapError):
    """A jump lies strictly inside the interval where a derivative bound was requested."""


class NotPositiveDefinite(JensenGapError):
    pass


class DimensionMismatch(JensenGapError):
    pass


class ZeroMeasure(JensenGapError):
    """The rational (classical Jensen) form is undefined on a null interval."""


class InvalidCount(JensenGapError):
    pass


class InvalidEpsilon(JensenGapError):
    pass


class NotIncreasing(JensenGapError):
    pass


class EmptySupport(JensenGapError):
    pass


class ConstraintViolated(JensenGapError):
    pass


class MaxDepthExceeded(ArithmeticError):
    """Adaptive quadrature did not converge before the recursion limit."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location
