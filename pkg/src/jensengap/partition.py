"""Fragmentation schemes: uniform, geometric, discontinuity-straddling, custom."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidCount, InvalidEpsilon, JensenGapError, NotIncreasing
from .functions import Interval, as_interval

__all__ = ["Partition", "uniform", "geometric", "straddle", "custom", "measures"]


@dataclass(frozen=True)
class Partition:
    """Breakpoints ``t_1 < ... < t_{N+1}`` splitting ``[t_1, t_{N+1}]`` into N fragments.

    ``lengths`` optionally carries fragment measures known in closed form.
    Differencing breakpoints that crowd near one end loses relative accuracy
    on the smallest fragments, so schemes that know their lengths pass them.
    """

    breakpoints: tuple
    lengths: tuple | None = None

    def __post_init__(self):
        pts = tuple(float(t) for t in self.breakpoints)
        if len(pts) < 2:
            raise NotIncreasing("a partition needs at least two breakpoints")
        if not all(math.isfinite(t) for t in pts):
            raise JensenGapError("breakpoints must be finite")
        if any(r <= l for l, r in zip(pts, pts[1:])):
            raise NotIncreasing(f"breakpoints must be strictly increasing: {pts}")
        object.__setattr__(self, "breakpoints", pts)
        if self.lengths is not None:
            if len(self.lengths) != len(pts) - 1:
                raise JensenGapError("one length per fragment is required")
            object.__setattr__(self, "lengths", tuple(float(h) for h in self.lengths))

    @property
    def count(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def interval(self) -> Interval:
        return Interval(self.breakpoints[0], self.breakpoints[-1])

    def fragments(self) -> list[Interval]:
        t = self.breakpoints
        return [Interval(l, r) for l, r in zip(t, t[1:])]

    def measures(self) -> np.ndarray:
        if self.lengths is not None:
            return np.array(self.lengths)
        return np.diff(self.breakpoints)

    def __len__(self):
        return self.count


def measures(p: Partition) -> np.ndarray:
    return p.measures()


def _check_count(N):
    if int(N) != N or N < 1:
        raise InvalidCount(f"fragment count must be a positive integer, got {N}")
    return int(N)


def uniform(I, N: int) -> Partition:
    """``N`` fragments of equal measure."""
    I = as_interval(I)
    N = _check_count(N)
    if I.measure() <= 0:
        raise JensenGapError("cannot fragment an interval of zero measure")
    h = I.measure() / N
    pts = [I.a + k * h for k in range(N)] + [I.b]
    return Partition(tuple(pts), lengths=(h,) * N)


def geometric(I, N: int, eps: float) -> Partition:
    """Fragments shrinking geometrically towards ``I.b``.

    On [0, 1] the breakpoints are ``t_i = (1 - eps**((i-1)/N)) / (1 - eps)``
    and the i-th fragment has measure ``eps**(i/N) * kappa0`` with
    ``kappa0 = (eps**(-1/N) - 1) / (1 - eps)``.  Other intervals are
    reached by the affine map ``t -> a + (b - a) t``.
    """
    I = as_interval(I)
    N = _check_count(N)
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise InvalidEpsilon(f"eps must lie in (0, 1), got {eps}")
    if I.measure() <= 0:
        raise JensenGapError("cannot fragment an interval of zero measure")
    log_eps = math.log(eps)
    denom = -math.expm1(log_eps)  # 1 - eps
    unit = [-math.expm1((i / N) * log_eps) / denom for i in range(N)] + [1.0]
    span = I.measure()
    pts = [I.a + span * t for t in unit[:-1]] + [I.b]
    kappa0 = math.expm1(-log_eps / N) / denom
    lengths = tuple(span * math.exp((i / N) * log_eps) * kappa0 for i in range(1, N + 1))
    return Partition(tuple(pts), lengths=lengths)


def straddle(I, eps: float) -> Partition:
    """Three fragments isolating a window of width ``eps`` around the midpoint."""
    I = as_interval(I)
    eps = float(eps)
    if not 0.0 < eps < I.measure():
        raise InvalidEpsilon(f"eps must lie in (0, {I.measure()}), got {eps}")
    lo = 0.5 * (I.a + I.b - eps)
    hi = 0.5 * (I.a + I.b + eps)
    return Partition((I.a, lo, hi, I.b))


def custom(points) -> Partition:
    return Partition(tuple(points))
