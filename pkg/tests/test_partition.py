import mpmath
import numpy as np
import pytest

from jensengap.errors import InvalidCount, InvalidEpsilon, JensenGapError, NotIncreasing
from jensengap.functions import Interval
from jensengap.partition import Partition, custom, geometric, measures, straddle, uniform


@pytest.mark.parametrize(
    "I, N, expected",
    [
        ((0, 1), 4, (0, 0.25, 0.5, 0.75, 1)),
        ((0, 1), 1, (0, 1)),
        ((-1, 1), 2, (-1, 0, 1)),
    ],
)
def test_uniform_examples(I, N, expected):
    assert uniform(I, N).breakpoints == pytest.approx(expected, abs=1e-15)


def test_uniform_rejects_bad_count():
    for N in (0, -3, 2.5):
        with pytest.raises(InvalidCount):
            uniform((0, 1), N)


def test_uniform_measures_equal_and_endpoints_pinned():
    for N in (3, 7, 100, 999):
        p = uniform((0.1, 2.3), N)
        assert p.breakpoints[0] == 0.1 and p.breakpoints[-1] == 2.3
        h = measures(p)
        assert np.all(np.abs(h - 2.2 / N) <= N * np.spacing(2.3))
        assert abs(h.sum() - 2.2) <= 1e-12 * 2.2


def test_geometric_examples():
    p = geometric((0, 1), 2, 1e-4)
    assert p.breakpoints[0] == 0.0 and p.breakpoints[-1] == 1.0
    assert p.breakpoints[1] == pytest.approx(0.99 / 0.9999, rel=1e-15)
    np.testing.assert_allclose(measures(p), [0.99 / 0.9999, 0.0099 / 0.9999], rtol=1e-14)
    for eps in (0.3, 1e-4):
        assert geometric((0, 1), 1, eps).breakpoints == (0.0, 1.0)


def test_geometric_rejects_bad_eps():
    for eps in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(InvalidEpsilon):
            geometric((0, 1), 3, eps)


@pytest.mark.parametrize("eps", [1e-1, 1e-2, 1e-4])
def test_geometric_measures_match_formula(eps):
    mpmath.mp.dps = 40
    for I in (Interval(0.0, 1.0), Interval(-2.0, 3.5)):
        mu = mpmath.mpf(I.b) - mpmath.mpf(I.a)
        e = mpmath.mpf(eps)
        for N in range(1, 201):
            h = measures(geometric(I, N, eps))
            kappa = (e ** (-mpmath.mpf(1) / N) - 1) / (1 - e)
            ref = np.array([float(e ** (mpmath.mpf(i) / N) * kappa * mu) for i in range(1, N + 1)])
            assert np.max(np.abs(h - ref) / ref) <= 1e-12
            assert abs(h.sum() - I.measure()) <= 1e-12 * I.measure()
            if N > 1:
                assert np.all(np.diff(h) < 0)


def test_geometric_breakpoints_follow_formula_and_affine_map():
    mpmath.mp.dps = 40
    N, eps = 7, 1e-2
    p = geometric((2.0, 5.0), N, eps)
    e = mpmath.mpf(eps)
    ref = [2 + 3 * float((1 - e ** (mpmath.mpf(i) / N)) / (1 - e)) for i in range(N + 1)]
    assert p.breakpoints == pytest.approx(ref, rel=1e-14)
    assert p.breakpoints[-1] == 5.0


@pytest.mark.parametrize(
    "I, eps, expected",
    [
        ((0, 1), 0.5, (0, 0.25, 0.75, 1)),
        ((0, 1), 0.01, (0, 0.495, 0.505, 1)),
        ((-1, 1), 1.0, (-1, -0.5, 0.5, 1)),
    ],
)
def test_straddle_examples(I, eps, expected):
    assert straddle(I, eps).breakpoints == pytest.approx(expected, abs=1e-15)


def test_straddle_measures_and_errors():
    np.testing.assert_allclose(measures(straddle((0, 1), 0.01)), [0.495, 0.01, 0.495], atol=1e-15)
    for eps in (0.0, 1.0, 1.5, -0.1):
        with pytest.raises(InvalidEpsilon):
            straddle((0, 1), eps)


def test_custom():
    p = custom([0, 0.3, 1])
    assert p.count == 2 and len(p) == 2
    with pytest.raises(NotIncreasing):
        custom([0, 0, 1])
    with pytest.raises(NotIncreasing):
        custom([1])
    with pytest.raises(NotIncreasing):
        custom([0, 2, 1])


def test_fragments_cover_interval():
    rng = np.random.default_rng(4)
    for _ in range(50):
        pts = np.unique(rng.uniform(-3, 3, int(rng.integers(2, 12))))
        if pts.size < 2:
            continue
        p = custom(pts)
        frags = p.fragments()
        assert frags[0].a == p.interval.a and frags[-1].b == p.interval.b
        assert all(u.b == v.a for u, v in zip(frags, frags[1:]))
        assert abs(measures(p).sum() - p.interval.measure()) <= 1e-12 * p.interval.measure()


def test_partition_is_immutable():
    p = uniform((0, 1), 3)
    with pytest.raises(AttributeError):
        p.breakpoints = (0, 1)


def test_lengths_must_match():
    with pytest.raises(JensenGapError):
        Partition((0.0, 0.5, 1.0), lengths=(1.0,))


def test_zero_measure_rejected():
    with pytest.raises(JensenGapError):
        uniform((1, 1), 3)
