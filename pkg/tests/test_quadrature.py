import math

import numpy as np
import pytest

from jensengap.errors import JensenGapError, MaxDepthExceeded
from jensengap.functions import Exponential, Interval, Signum
from jensengap.quadrature import default_tol, integrate_phi, integrate_scalar, integrate_vector

from helpers import random_function, random_interval


def test_exp_example():
    r = integrate_scalar(lambda t: math.exp(2 * t), (0, 1), tol=1e-10)
    assert abs(r.value - (math.e**2 - 1) / 2) <= 1e-10
    assert r.error_estimate >= 0 and r.subdivisions >= 1


def test_signum_with_breakpoint_is_exact():
    r = integrate_scalar(lambda t: 1.0 if t >= 0.5 else -1.0, (0, 1), [0.5])
    assert r.value == 0.0


def test_constant():
    assert integrate_scalar(lambda t: 1.0, (2, 5)).value == pytest.approx(3.0, abs=1e-15)


def test_vector_and_phi_examples():
    assert integrate_vector(Exponential(1), (0, 1))[0] == pytest.approx(math.e - 1, abs=1e-10)
    assert integrate_vector(Signum(0.5), (0, 1))[0] == pytest.approx(0.0, abs=1e-15)
    # -0.1 + 0.5 = 0.4
    assert integrate_vector(Signum(0.5), (0.4, 1))[0] == pytest.approx(0.4, abs=1e-14)
    assert integrate_phi(Exponential(1), (0, 1)) == pytest.approx((math.e**2 - 1) / 2, abs=1e-10)
    assert integrate_phi(Signum(0.5), (0, 1)) == pytest.approx(1.0, abs=1e-14)
    assert integrate_phi(Exponential(0), (0, 1)) == pytest.approx(1.0, abs=1e-15)


def test_vectorized_flag_matches_scalar_calls():
    g = lambda t: np.sin(3 * t) * np.exp(-t)
    a = integrate_scalar(g, (0, 2), vectorized=True).value
    b = integrate_scalar(lambda t: math.sin(3 * t) * math.exp(-t), (0, 2)).value
    assert a == pytest.approx(b, abs=1e-13)


def test_rejects_nonpositive_tol():
    with pytest.raises(JensenGapError):
        integrate_scalar(lambda t: t, (0, 1), tol=0.0)


def test_unsplit_jump_exhausts_depth():
    with pytest.raises(MaxDepthExceeded):
        integrate_scalar(lambda t: 1.0 if t >= 1 / 3 else -1.0, (0, 1), tol=1e-300,
                         rel_tol=0.0)


def test_default_tol_env(monkeypatch):
    monkeypatch.delenv("JGL_DEFAULT_TOL", raising=False)
    assert default_tol() == 1e-10
    monkeypatch.setenv("JGL_DEFAULT_TOL", "1e-6")
    assert default_tol() == 1e-6
    monkeypatch.setenv("JGL_DEFAULT_TOL", "-1")
    with pytest.raises(JensenGapError):
        default_tol()


def test_linearity():
    rng = np.random.default_rng(2)
    tol = 1e-10
    for _ in range(100):
        I = random_interval(rng)
        f = random_function(rng, interval=I)
        b = rng.uniform(I.a, I.b)
        whole = integrate_phi(f, I, tol)
        parts = integrate_phi(f, (I.a, b), tol) + integrate_phi(f, (b, I.b), tol)
        assert abs(whole - parts) <= 2 * tol + 1e-13 * abs(whole)


def test_agreement_with_exact_on_random_cases():
    rng = np.random.default_rng(20240611)
    tol = 1e-10
    worst = 0.0
    for _ in range(1000):
        I = random_interval(rng)
        f = random_function(rng, interval=I)
        exact_v = f.integral(I)
        exact_p = f.phi_integral(I)
        quad_v = integrate_vector(f, I, tol)
        quad_p = integrate_phi(f, I, tol)
        for q, e in [*zip(quad_v, exact_v), (quad_p, exact_p)]:
            allowed = max(tol, 1e-12 * abs(e))
            worst = max(worst, abs(q - e) / allowed)
    assert worst <= 1.0


def test_error_estimate_bounds_true_error():
    rng = np.random.default_rng(99)
    for _ in range(300):
        I = random_interval(rng)
        f = random_function(rng, interval=I)

        def phi(s):
            F = np.atleast_2d(f(s))
            return np.sum(F * F, axis=0)

        r = integrate_scalar(phi, I, f.breaks, 1e-10, vectorized=True)
        assert abs(r.value - f.phi_integral(I)) <= r.error_estimate


def test_breakpoints_outside_are_ignored():
    r = integrate_scalar(lambda t: t, Interval(0.0, 1.0), [-1.0, 0.0, 1.0, 2.0])
    assert r.value == pytest.approx(0.5, abs=1e-15)


def test_jump_at_right_endpoint_uses_left_limit():
    # right-continuous step that jumps exactly at b
    r = integrate_scalar(lambda t: 5.0 if t >= 1.0 else 1.0, (0, 1))
    assert r.value == pytest.approx(1.0, abs=1e-15)


def test_large_smooth_integrand_converges():
    # panels near t = 2.2 carry |g| ~ 5e4; a rounded midpoint must not stall refinement
    f = Exponential([-0.13198073606923622, 2.6171175422287005], [0.9020370131273623, 0.7887071481950567])
    I = Interval(0.8992279108779684, 2.217398094601747)
    assert integrate_phi(f, I, 1e-10) == pytest.approx(f.phi_integral(I), rel=1e-13)
