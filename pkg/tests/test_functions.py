import math

import mpmath
import numpy as np
import pytest

from jensengap.errors import DimensionMismatch, DiscontinuityInside, JensenGapError, NotPositiveDefinite
from jensengap.functions import (
    Exponential,
    Interval,
    Linear,
    PiecewiseLinear,
    Polynomial,
    Signum,
    Sine,
    reduce_quadratic,
)
from jensengap.quadrature import integrate_phi, integrate_scalar, integrate_vector

from helpers import random_function, random_interval

E = math.e


def test_interval_rejects_reversed():
    with pytest.raises(JensenGapError):
        Interval(1.0, 0.0)
    assert Interval(2, 5).measure() == 3.0


@pytest.mark.parametrize(
    "f, t, expected",
    [
        (Exponential(1), 0.0, [1.0]),
        (Signum(0.5), 0.25, [-1.0]),
        (Signum(0.5), 0.5, [1.0]),
        (Signum(0.5, dimension=3), 0.75, [1.0, 1.0, 1.0]),
        (Polynomial([[1, 0, 2], [0, 1]]), 2.0, [9.0, 2.0]),
        (PiecewiseLinear([0, 1, 2], [[0, 2, 0]]), 1.5, [1.0]),
        (PiecewiseLinear([0, 1], [[3, 5]]), -4.0, [3.0]),
    ],
)
def test_eval(f, t, expected):
    np.testing.assert_allclose(f(t), expected, rtol=0, atol=1e-15)


def test_eval_vectorized_shape():
    f = Sine([1.0, 2.0], [0.0, 0.3])
    assert f(np.linspace(0, 1, 7)).shape == (2, 7)


def test_exact_integral_examples():
    assert Exponential(1).integral((0, 1))[0] == pytest.approx(E - 1, rel=1e-15)
    assert Signum(0.5).integral((0, 1))[0] == 0.0
    assert Exponential(2).integral((0, 1))[0] == pytest.approx(3.194528049465325, rel=1e-15)
    assert Signum(0.5).integral((0.4, 1))[0] == pytest.approx(0.4, abs=1e-15)


def test_exact_phi_integral_examples():
    # mpmath at 40 digits as the oracle
    mpmath.mp.dps = 40
    assert Exponential(1).phi_integral((0, 1)) == pytest.approx(
        float((mpmath.e**2 - 1) / 2), rel=1e-15)
    assert Signum(0.5).phi_integral((0, 1)) == 1.0
    # (e^2 - e)/2 = 2.335387...
    assert Exponential(1).phi_integral((0.5, 1)) == pytest.approx(
        float((mpmath.e**2 - mpmath.e) / 2), rel=1e-15)


def test_gram_matches_mpmath_for_mixed_sines():
    mpmath.mp.dps = 30
    f = Sine([2.0, 2.0 + 1e-9, -3.0], [0.1, 0.2, 0.7], [1.0, -0.5, 2.0])
    G = f.gram((0.2, 1.3))
    for i in range(3):
        for j in range(3):
            w = f.frequency
            p = f.phase
            A = f.amplitude
            ref = mpmath.quad(
                lambda s: A[i] * A[j] * mpmath.sin(w[i] * s + p[i]) * mpmath.sin(w[j] * s + p[j]),
                [0.2, 1.3])
            assert G[i, j] == pytest.approx(float(ref), abs=1e-14)


@pytest.mark.parametrize(
    "f, I, lo, hi",
    [
        (Exponential(1), (0, 1), 1.0, E),
        (Exponential(-2), (0, 1), math.exp(-2), 1.0),
        (Signum(0.5), (0, 1), -1.0, 1.0),
        (Signum(0.5), (0.6, 1), 1.0, 1.0),
        (Signum(0.5), (0.0, 0.4), -1.0, -1.0),
        # the closed fragment [0, 0.5] contains the point where sgn is +1
        (Signum(0.5), (0.0, 0.5), -1.0, 1.0),
        (Sine(1.0), (0, math.pi), 0.0, 1.0),
        (Polynomial([[0, 0, 1]]), (-1, 2), 0.0, 4.0),
        (PiecewiseLinear([0, 1, 2], [[0, 2, 0]]), (0.5, 1.5), 1.0, 2.0),
    ],
)
def test_extrema(f, I, lo, hi):
    m, M = f.extrema(I)
    assert m[0] == pytest.approx(lo, abs=1e-15)
    assert M[0] == pytest.approx(hi, abs=1e-15)


def test_extrema_attained_on_dense_scan():
    rng = np.random.default_rng(11)
    for _ in range(200):
        kind = ["exp", "poly", "sin", "pwl"][rng.integers(4)]
        f = random_function(rng, kind)
        I = random_interval(rng)
        m, M = f.extrema(I)
        grid = np.linspace(I.a, I.b, 20_001)
        grid = np.union1d(grid, [k for k in f.kinks if I.a <= k <= I.b])
        vals = f(grid)
        scale = np.maximum(M - m, 1e-300)
        assert np.all(vals.min(axis=1) >= m - 1e-12)
        assert np.all(vals.max(axis=1) <= M + 1e-12)
        assert np.all(np.abs(vals.min(axis=1) - m) <= 1e-6 * scale + 1e-14)
        assert np.all(np.abs(vals.max(axis=1) - M) <= 1e-6 * scale + 1e-14)


def test_deriv_sup_examples():
    assert Exponential(1).deriv_sup((0, 1))[0] == pytest.approx(E, rel=1e-15)
    assert Exponential(100).deriv_sup((0, 0.5))[0] == pytest.approx(100 * math.exp(50), rel=1e-14)
    with pytest.raises(DiscontinuityInside):
        Signum(0.5).deriv_sup((0, 1))
    # a jump on the boundary is not inside
    assert Signum(0.5).deriv_sup((0.5, 1))[0] == 0.0


def test_deriv_sup_sine_uses_critical_points():
    f = Sine(3.0, 0.2, 2.0)
    # cos(3t + 0.2) = +-1 at t = (k pi - 0.2)/3; (pi - 0.2)/3 is inside
    assert f.deriv_sup((0.9, 1.1))[0] == 6.0
    # no critical point inside: the endpoints win
    d = f.deriv_sup((0.2, 0.3))[0]
    assert d == pytest.approx(max(abs(6 * math.cos(0.8)), abs(6 * math.cos(1.1))), rel=1e-15)


def test_deriv_sup_piecewise_linear_takes_both_slopes_at_kinks():
    f = PiecewiseLinear([0, 1, 2], [[0, 1, 4]])
    assert f.deriv_sup((0.2, 0.8))[0] == 1.0
    assert f.deriv_sup((0.2, 1.0))[0] == 3.0  # kink at the right end
    assert f.deriv_sup((1.2, 1.8))[0] == 3.0


def test_deriv_sup_dominates_sampled_derivative():
    rng = np.random.default_rng(5)
    for _ in range(200):
        f = random_function(rng, ["exp", "poly", "sin", "pwl"][rng.integers(4)])
        I = random_interval(rng)
        d = f.deriv_sup(I)
        sampled = np.abs(f.derivative(np.linspace(I.a, I.b, 5000))).max(axis=1)
        assert np.all(sampled <= d * (1 + 1e-12) + 1e-12)


def test_piecewise_linear_validation():
    with pytest.raises(JensenGapError):
        PiecewiseLinear([0, 0, 1], [[0, 1, 2]])
    with pytest.raises(DimensionMismatch):
        PiecewiseLinear([0, 1, 2], [[0, 1]])


def test_piecewise_linear_declares_kinks_not_jumps():
    f = PiecewiseLinear([0, 1, 2], [[0, 1, 0]])
    assert f.discontinuities == ()
    assert f.kinks == (0.0, 1.0, 2.0)


def test_only_signum_declares_a_discontinuity():
    assert Signum(0.3).discontinuities == (0.3,)
    for f in (Exponential(1), Polynomial([[1, 2]]), Sine(1.0), PiecewiseLinear([0, 1], [[0, 1]])):
        assert f.discontinuities == ()


def test_specs_are_immutable_and_hashable():
    f = Exponential([1.0, 2.0])
    with pytest.raises(AttributeError):
        f.alpha = (3.0,)
    assert hash(f) == hash(Exponential([1.0, 2.0]))
    assert f == Exponential([1.0, 2.0])


# -- reduce_quadratic --------------------------------------------------------


def test_reduce_identity_returns_same_spec():
    f = Exponential([1.0, -0.5])
    assert reduce_quadratic(np.eye(2), f) is f


def test_reduce_scalar_scaling():
    g = reduce_quadratic([[4.0]], Exponential(1))
    assert g(0.3)[0] == pytest.approx(2 * math.exp(0.3), rel=1e-15)
    m, M = g.extrema((0, 1))
    assert (m[0], M[0]) == pytest.approx((2.0, 2 * E), rel=1e-15)


def test_reduce_diagonal():
    f = Sine([1.0, 2.0])
    g = reduce_quadratic(np.diag([1.0, 9.0]), f)
    np.testing.assert_allclose(g(0.7), [math.sin(0.7), 3 * math.sin(1.4)], rtol=1e-15)


def test_reduce_rejects_indefinite_and_wrong_size():
    with pytest.raises(NotPositiveDefinite):
        reduce_quadratic([[1.0, 2.0], [2.0, 1.0]], Exponential([1.0, 2.0]))
    with pytest.raises(DimensionMismatch):
        reduce_quadratic(np.eye(3), Exponential([1.0, 2.0]))


def _phi_q_gap_by_quadrature(Q, f, I):
    """mu * int f^T Q f - (int f)^T Q (int f), every integral by quadrature."""
    mu = I.measure()
    v = integrate_vector(f, I, 1e-12)

    def form(s):
        F = np.atleast_2d(f(s))
        return np.einsum("ik,ij,jk->k", F, Q, F)

    quad = integrate_scalar(form, I, f.breaks, 1e-12, vectorized=True).value
    return mu * quad - v @ Q @ v


def test_reduce_quadratic_preserves_gap():
    rng = np.random.default_rng(3)
    for _ in range(40):
        n = int(rng.integers(2, 4))
        f = Exponential(rng.uniform(-2, 2, n), rng.uniform(0.5, 2, n))
        u = rng.normal(size=n)
        Q = np.diag(rng.uniform(0.5, 3.0, n)) + np.outer(u, u)
        I = random_interval(rng)
        g = reduce_quadratic(Q, f)
        reduced = I.measure() * g.phi_integral(I) - float(g.integral(I) @ g.integral(I))
        expected = _phi_q_gap_by_quadrature(Q, f, I)
        assert reduced == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_linear_composition_generic_extrema_against_scan():
    f = Linear(np.array([[1.0, 1.0], [0.0, 2.0]]), Sine([3.0, -2.0], [0.0, 1.0]))
    I = Interval(0.0, 2.0)
    m, M = f.extrema(I)
    vals = f(np.linspace(0, 2, 20001))
    np.testing.assert_allclose(m, vals.min(axis=1), atol=1e-7)
    np.testing.assert_allclose(M, vals.max(axis=1), atol=1e-7)
    d = f.deriv_sup(I)
    np.testing.assert_allclose(d, np.abs(f.derivative(np.linspace(0, 2, 20001))).max(axis=1),
                               atol=1e-6)


def test_quadrature_fallback_oracle_matches_phi_integral():
    f = Polynomial([[1, -1, 0.5], [0, 3]])
    assert integrate_phi(f, (0, 2), 1e-12) == pytest.approx(f.phi_integral((0, 2)), rel=1e-13)
