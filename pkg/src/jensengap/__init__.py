"""Jensen gap quantification for quadratic integrands.

Exact Jensen gaps of catalog functions, Grüss-type upper bounds, gap
reduction by uniform and geometric fragmentation, and the completion-of-
squares equivalence between rational and affine integral bounds.
"""

from .errors import (
    ConstraintViolated,
    DimensionMismatch,
    DiscontinuityInside,
    EmptySupport,
    InvalidCount,
    InvalidEpsilon,
    JensenGapError,
    MaxDepthExceeded,
    NotIncreasing,
    NotPositiveDefinite,
    ZeroMeasure,
)
from .functions import (
    Exponential,
    FunctionSpec,
    Interval,
    Linear,
    PiecewiseLinear,
    Polynomial,
    Signum,
    Sine,
    reduce_quadratic,
)
from .partition import Partition, custom, geometric, straddle, uniform

__all__ = [
    "ConstraintViolated",
    "DimensionMismatch",
    "DiscontinuityInside",
    "EmptySupport",
    "InvalidCount",
    "InvalidEpsilon",
    "JensenGapError",
    "MaxDepthExceeded",
    "NotIncreasing",
    "NotPositiveDefinite",
    "ZeroMeasure",
    "Exponential",
    "FunctionSpec",
    "Interval",
    "Linear",
    "PiecewiseLinear",
    "Polynomial",
    "Signum",
    "Sine",
    "reduce_quadratic",
    "Partition",
    "custom",
    "geometric",
    "straddle",
    "uniform",
]

__version__ = "0.1.0"
