"""Seeded generators for randomized catalog cases."""

import numpy as np

from jensengap.functions import Exponential, Interval, PiecewiseLinear, Polynomial, Signum, Sine
from jensengap.partition import custom, geometric, straddle, uniform

KINDS = ("exp", "sgn", "poly", "sin", "pwl")


def random_function(rng, kind=None, interval=None):
    kind = kind or KINDS[rng.integers(len(KINDS))]
    n = int(rng.integers(1, 3))
    if kind == "exp":
        return Exponential(rng.uniform(-3, 3, n), rng.uniform(-2, 2, n))
    if kind == "sgn":
        if interval is not None and rng.random() < 0.7:
            c = rng.uniform(interval.a, interval.b)
        else:
            c = rng.uniform(-2, 2)
        return Signum(c, n)
    if kind == "poly":
        deg = int(rng.integers(0, 5))
        return Polynomial(rng.uniform(-2, 2, (n, deg + 1)))
    if kind == "sin":
        return Sine(rng.uniform(-8, 8, n), rng.uniform(-np.pi, np.pi, n), rng.uniform(-2, 2, n))
    k = int(rng.integers(2, 7))
    x = np.sort(rng.uniform(-2.5, 2.5, k))
    x = x + np.arange(k) * 1e-3  # keep strictly increasing
    return PiecewiseLinear(x, rng.uniform(-2, 2, (n, k)))


def random_interval(rng):
    a = rng.uniform(-2, 1)
    return Interval(a, a + rng.uniform(0.05, 2.0))


def random_partition(rng, I):
    choice = rng.integers(4)
    if choice == 0:
        return uniform(I, int(rng.integers(1, 13)))
    if choice == 1:
        return geometric(I, int(rng.integers(1, 13)), [1e-1, 1e-2, 1e-4][rng.integers(3)])
    if choice == 2:
        return straddle(I, rng.uniform(0.01, 0.99) * I.measure())
    k = int(rng.integers(0, 8))
    inner = np.sort(rng.uniform(I.a, I.b, k))
    pts = np.unique(np.concatenate([[I.a], inner, [I.b]]))
    return custom(pts)


def random_case(rng):
    I = random_interval(rng)
    f = random_function(rng, interval=I)
    return f, I, random_partition(rng, I)
