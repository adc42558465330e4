"""Jensen gaps for ``phi(z) = z^T z`` and their Grüss-type upper bounds.

Conventions
-----------
For a fragment ``U`` with measure ``mu``, the *unnormalized gap* is
``mu * int_U f^T f - |int_U f|^2`` and the *Jensen term* is
``J = -|int_U f|^2 / mu``.  On a partition, ``total_gap`` is the sum of the
fragment gaps; it is what ``e1`` and ``e2`` bound.  The sum of Jensen terms
approximates ``S(U) = -int_U f^T f`` from above and is what the normalized
curves ``J_N / J`` track.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DiscontinuityInside, EmptySupport, InvalidCount, JensenGapError
from .functions import FunctionSpec, Interval, as_interval
from .partition import Partition, geometric, uniform
from .quadrature import integrate_phi, integrate_scalar, integrate_vector

__all__ = [
    "FragmentGap",
    "GapReport",
    "fragment_gap",
    "theorem1_bound",
    "corollary1_bound",
    "fragmented_report",
    "e1_uniform",
    "e2_uniform",
    "recurrence_check_e1",
    "recurrence_check_e2",
    "example2_closed_forms",
    "GrussResult",
    "gruss_check",
    "discrete_gap",
    "ScanRow",
    "convergence_scan",
]

_ALPHA_GUARD = 1e-8


@dataclass(frozen=True)
class FragmentGap:
    fragment: Interval
    phi_integral: float
    integral_sq: float
    gap_unnormalized: float
    jensen_term: float


@dataclass(frozen=True)
class GapReport:
    fragments: tuple
    total_gap: float
    e1: float
    e2: float | None
    normalized_jensen_sum: float
    exact_functional: float

    @property
    def normalized(self) -> float:
        """``sum J_i / S(U)``; 1 means the fragmented Jensen bound is exact."""
        if self.exact_functional == 0.0:
            return 1.0
        return self.normalized_jensen_sum / self.exact_functional


def _exact_or_quadrature(f: FunctionSpec, I: Interval):
    try:
        return f.phi_integral(I), f.integral(I)
    except NotImplementedError:
        return integrate_phi(f, I), integrate_vector(f, I)


def fragment_gap(f: FunctionSpec, I) -> FragmentGap:
    I = as_interval(I)
    mu = I.measure()
    if mu <= 0:
        raise JensenGapError("fragment must have positive measure")
    phi_int, v = _exact_or_quadrature(f, I)
    sq = float(v @ v)
    gap = mu * phi_int - sq
    if not np.any(f.oscillation(I)):
        gap = 0.0  # constant on I: Jensen is exact, keep rounding out of it
    return FragmentGap(
        fragment=I,
        phi_integral=phi_int,
        integral_sq=sq,
        gap_unnormalized=gap,
        jensen_term=0.0 - sq / mu,
    )


def theorem1_bound(f: FunctionSpec, I) -> float:
    """``(mu^2 / 4) |M - m|^2`` with componentwise extrema over ``I``."""
    I = as_interval(I)
    delta = f.oscillation(I)
    return I.measure() ** 2 / 4.0 * float(delta @ delta)


def corollary1_bound(f: FunctionSpec, I) -> float:
    """``(mu^4 / 4) |sup |f'||^2``; raises DiscontinuityInside across a jump."""
    I = as_interval(I)
    d = f.deriv_sup(I)
    return I.measure() ** 4 / 4.0 * float(d @ d)


def fragmented_report(f: FunctionSpec, p: Partition) -> GapReport:
    """Per-fragment gaps on ``p`` together with the ``e1`` and ``e2`` sums.

    ``e2`` is ``None`` as soon as one fragment has a jump strictly inside.
    """
    frags = []
    e1 = 0.0
    e2 = 0.0
    for I in p.fragments():
        frags.append(fragment_gap(f, I))
        e1 += theorem1_bound(f, I)
        if e2 is not None:
            try:
                e2 += corollary1_bound(f, I)
            except DiscontinuityInside:
                e2 = None
    total = math.fsum(g.gap_unnormalized for g in frags)
    jensen = math.fsum(g.jensen_term for g in frags)
    exact = -math.fsum(g.phi_integral for g in frags)
    return GapReport(tuple(frags), total, e1, e2, jensen, exact)


def _uniform_fragments(I, N):
    return uniform(I, N).fragments()


def _theta(f, I, N, global_):
    if global_:
        return f.oscillation(I)
    return np.max([f.oscillation(U) for U in _uniform_fragments(I, N)], axis=0)


def _eta(f, I, N, global_):
    if global_:
        return f.deriv_sup(I)
    return np.max([f.deriv_sup(U) for U in _uniform_fragments(I, N)], axis=0)


def e1_uniform(f: FunctionSpec, I, N: int, *, global_theta: bool = False) -> float:
    """``mu^2 |theta|^2 / (4N)`` on the uniform N-partition.

    ``theta_i`` is the largest fragment oscillation of component ``i``.  With
    ``global_theta`` the oscillation over the whole interval is used
    instead, which makes the value satisfy the ``(1 - 1/N)`` recurrence
    exactly.
    """
    I = as_interval(I)
    if N < 1:
        raise InvalidCount(f"N must be positive, got {N}")
    theta = _theta(f, I, N, global_theta)
    return I.measure() ** 2 / (4.0 * N) * float(theta @ theta)


def e2_uniform(f: FunctionSpec, I, N: int, *, global_eta: bool = False) -> float:
    """``mu^4 |eta|^2 / (4 N^3)`` where ``eta`` is the largest fragment ``sup |f'|``."""
    I = as_interval(I)
    if N < 1:
        raise InvalidCount(f"N must be positive, got {N}")
    eta = _eta(f, I, N, global_eta)
    return I.measure() ** 4 / (4.0 * N**3) * float(eta @ eta)


def recurrence_check_e1(N: int, base: float) -> float:
    """Predicted ``e1(N)`` from ``e1(N-1) = base``."""
    if N <= 1:
        raise InvalidCount("the recurrence starts at N = 2")
    return (1.0 - 1.0 / N) * base


def recurrence_check_e2(N: int, base: float) -> float:
    """Predicted ``e2(N)`` from ``e2(N-1) = base``.

    The factor ``1 + (-3N^2 + 3N - 1)/N^3`` equals ``((N-1)/N)^3``.
    """
    if N <= 1:
        raise InvalidCount("the recurrence starts at N = 2")
    return (1.0 + (-3.0 * N * N + 3.0 * N - 1.0) / N**3) * base


def example2_closed_forms(alpha: float, N: int) -> tuple[float, float]:
    """Closed forms of ``J = -int_0^1 e^{2 alpha t} dt`` and its N-fragment Jensen sum.

    ``J_N = -N (1 - e^{alpha/N}) (1 - e^{2 alpha}) / (alpha^2 (1 + e^{alpha/N}))``.
    Both tend to -1 as ``alpha -> 0``.
    """
    if N < 1:
        raise InvalidCount(f"N must be positive, got {N}")
    alpha = float(alpha)
    if abs(alpha) < _ALPHA_GUARD:
        return -1.0, -1.0
    J = -math.expm1(2.0 * alpha) / (2.0 * alpha)
    J_N = N * math.expm1(alpha / N) * (-math.expm1(2.0 * alpha)) / (
        alpha * alpha * (1.0 + math.exp(alpha / N))
    )
    return J, J_N


class GrussResult(NamedTuple):
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def holds(self, tol: float = 1e-9) -> bool:
        return self.lhs <= self.rhs + tol


def gruss_check(f: FunctionSpec, g: FunctionSpec, I, i: int = 0, j: int = 0,
                tol: float | None = None) -> GrussResult:
    """Both sides of the Grüss inequality for components ``f_i`` and ``g_j``.

    ``lhs = |<f,g>/mu - <f,1><g,1>/mu^2|`` and ``rhs = delta_f delta_g / 4``.
    The cross inner product is exact when ``f`` and ``g`` are the same
    function and comes from quadrature otherwise.
    """
    I = as_interval(I)
    mu = I.measure()
    if mu <= 0:
        raise JensenGapError("Grüss check needs positive measure")
    fi = float(f.integral(I)[i])
    gj = float(g.integral(I)[j])
    if f == g:
        fg = float(f.gram(I)[i, j])
    else:
        breaks = sorted(set(f.breaks) | set(g.breaks))
        fg = integrate_scalar(
            lambda s: np.atleast_2d(f(s))[i] * np.atleast_2d(g(s))[j],
            I, breaks, tol, vectorized=True,
        ).value
    lhs = abs(fg / mu - fi * gj / mu**2)
    rhs = 0.25 * float(f.oscillation(I)[i]) * float(g.oscillation(I)[j])
    return GrussResult(lhs, rhs)


def discrete_gap(values: Sequence, weights: Sequence[float]) -> tuple[float, float]:
    """Discrete Jensen gap and its Grüss-type bound.

    Returns ``(mu * sum w_i |f_i|^2 - |sum w_i f_i|^2, mu^2 |delta|^2 / 4)``
    with ``mu = sum w_i`` and ``delta`` the componentwise range over the
    points of positive weight.
    """
    w = np.asarray(weights, dtype=float)
    F = np.asarray(values, dtype=float)
    if F.ndim == 1:
        F = F[:, None]
    if w.ndim != 1 or w.shape[0] != F.shape[0]:
        raise JensenGapError("one weight per value is required")
    if np.any(w < 0):
        raise JensenGapError("weights must be nonnegative")
    support = w > 0
    if not np.any(support):
        raise EmptySupport("at least one weight must be positive")
    mu = float(w.sum())
    s = w @ F
    gap = mu * float(np.sum(w * np.sum(F * F, axis=1))) - float(s @ s)
    delta = F[support].max(axis=0) - F[support].min(axis=0)
    return gap, mu**2 / 4.0 * float(delta @ delta)


@dataclass(frozen=True)
class ScanRow:
    N: int
    jensen_sum: float
    exact: float
    normalized: float
    gap: float
    e1: float
    e2: float | None
    ratio_next: float | None

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "jensen_sum": self.jensen_sum,
            "exact": self.exact,
            "normalized": self.normalized,
            "gap": self.gap,
            "e1": self.e1,
            "e2": self.e2,
            "ratio_next": self.ratio_next,
        }


SCAN_COLUMNS = ("N", "jensen_sum", "exact", "normalized", "gap", "e1", "e2", "ratio_next")


def _scheme_partition(I, scheme, N, eps):
    if scheme == "uniform":
        return uniform(I, N)
    if scheme == "geometric":
        return geometric(I, N, eps)
    raise JensenGapError(f"unknown scheme {scheme!r}")


def convergence_scan(f: FunctionSpec, I, scheme: str = "uniform", N_max: int = 20,
                     eps: float | None = None) -> list[ScanRow]:
    """Fragmented reports for ``N = 1 .. N_max``.

    ``e1`` and ``e2`` are the fragment sums of the report, valid for any
    scheme.  ``ratio_next`` is ``(J_{N+1} - S) / (J_N - S)``; it is ``None``
    when ``J_N`` is already exact.
    """
    I = as_interval(I)
    if N_max < 2:
        raise InvalidCount(f"N_max must be at least 2, got {N_max}")
    if scheme == "geometric" and eps is None:
        raise JensenGapError("the geometric scheme needs eps")
    reports = [fragmented_report(f, _scheme_partition(I, scheme, N, eps))
               for N in range(1, N_max + 2)]
    rows = []
    for k in range(N_max):
        r, nxt = reports[k], reports[k + 1]
        here = r.normalized_jensen_sum - r.exact_functional
        there = nxt.normalized_jensen_sum - nxt.exact_functional
        rows.append(ScanRow(
            N=k + 1,
            jensen_sum=r.normalized_jensen_sum,
            exact=r.exact_functional,
            normalized=r.normalized,
            gap=r.total_gap,
            e1=r.e1,
            e2=r.e2,
            ratio_next=(there / here) if here != 0.0 else None,
        ))
    return rows
