"""Completion of squares and the affine/rational bound family.

For ``C > 0`` the Schur-type expression ``A - B^T C^{-1} B`` is the minimum,
in the Loewner order, of ``A + N^T B + B^T N + N^T C N`` over the slack
``N``, attained only at ``N* = -C^{-1} B``.  Applied with ``C = mu R^{-1}``
and ``B = M`` this shows that the affine bound

    Q(N) = N^T M + M^T N + mu N^T R^{-1} N

dominates the rational Jensen bound ``-M^T R M / mu`` for every slack and
meets it at ``N = -R M / mu``.  The affine form stays finite as
``mu -> 0``; the rational one does not.

Inverses are never formed: everything goes through the triangular factor
of ``C`` (or ``R``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    ConstraintViolated,
    DimensionMismatch,
    JensenGapError,
    NotPositiveDefinite,
    ZeroMeasure,
)
from .functions import FunctionSpec, as_interval
from .quadrature import integrate_scalar

PSD_TOL = 1e-9
SYM_TOL = 1e-12


def _mat(X, name="matrix") -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.ndim != 2:
        raise DimensionMismatch(f"{name} must be two-dimensional")
    if not np.all(np.isfinite(X)):
        raise JensenGapError(f"{name} has non-finite entries")
    return X


def _check_symmetric(S, name="matrix"):
    if S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got {S.shape}")
    scale = max(1.0, float(np.max(np.abs(S))))
    if np.max(np.abs(S - S.T)) > SYM_TOL * scale:
        raise JensenGapError(f"{name} is not symmetric")


def sym(S) -> np.ndarray:
    return 0.5 * (S + S.T)


def cholesky(S) -> np.ndarray:
    """Upper-triangular ``L`` with positive diagonal and ``S = L^T L``.

    Raises NotPositiveDefinite when a pivot drops below ``1e-12`` times
    the trace scale.
    """
    S = _mat(S)
    _check_symmetric(S)
    n = S.shape[0]
    floor = 1e-12 * max(abs(float(np.trace(S))) / n, np.finfo(float).tiny)
    L = np.zeros_like(S)
    for k in range(n):
        pivot = S[k, k] - L[:k, k] @ L[:k, k]
        if not pivot > floor:
            raise NotPositiveDefinite(f"pivot {k} is {pivot:.3e}, matrix is not positive definite")
        L[k, k] = math.sqrt(pivot)
        L[k, k + 1:] = (S[k, k + 1:] - L[:k, k] @ L[:k, k + 1:]) / L[k, k]
    return L


def _solve_spd(L, B):
    """``S^{-1} B`` for ``S = L^T L``."""
    Y = solve_triangular(L, B, trans="T", lower=False)
    return solve_triangular(L, Y, lower=False)


def jacobi_eigenvalues(S, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending."""
    A = sym(_mat(S)).copy()
    n = A.shape[0]
    norm = np.linalg.norm(A)
    if n == 1 or norm == 0.0:
        return np.sort(np.diag(A))
    target = 1e-15 * norm
    for _ in range(max_sweeps):
        off = math.sqrt(max(float(np.sum(A * A) - np.sum(np.diag(A) ** 2)), 0.0))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                diff = A[q, q] - A[p, p]
                if abs(diff) + 1e8 * abs(apq) == abs(diff):
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                A[p, q] = A[q, p] = 0.0
    return np.sort(np.diag(A))


def min_eig(S) -> float:
    return float(jacobi_eigenvalues(S)[0])


def psd_tol(S) -> float:
    """Absolute tolerance on ``min_eig``, scaled up for matrices of norm > 1."""
    return PSD_TOL * max(1.0, float(np.linalg.norm(S)))


@dataclass(frozen=True)
class LemmaTriple:
    """``(A, B, C)`` with ``A`` symmetric n x n, ``B`` m x n, ``C`` m x m positive definite."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A, B, C = _mat(self.A, "A"), _mat(self.B, "B"), _mat(self.C, "C")
        _check_symmetric(A, "A")
        _check_symmetric(C, "C")
        if B.shape != (C.shape[0], A.shape[0]):
            raise DimensionMismatch(
                f"B must be {C.shape[0]}x{A.shape[0]}, got {B.shape[0]}x{B.shape[1]}"
            )
        for name, X in (("A", A), ("B", B), ("C", C)):
            X.setflags(write=False)
            object.__setattr__(self, name, X)

    @property
    def factor(self) -> np.ndarray:
        return cholesky(self.C)


def m1(t: LemmaTriple) -> np.ndarray:
    """``A - B^T C^{-1} B``."""
    Y = solve_triangular(t.factor, t.B, trans="T", lower=False)
    return sym(t.A - Y.T @ Y)


def _check_slack(t: LemmaTriple, N):
    N = _mat(N, "N")
    if N.shape != t.B.shape:
        raise DimensionMismatch(f"slack must be {t.B.shape}, got {N.shape}")
    return N


def m2(t: LemmaTriple, N) -> np.ndarray:
    """``A + N^T B + B^T N + N^T C N``."""
    N = _check_slack(t, N)
    return sym(t.A + N.T @ t.B + t.B.T @ N + N.T @ t.C @ N)


def n_star(t: LemmaTriple) -> np.ndarray:
    """The unique minimizing slack ``-C^{-1} B``."""
    return -_solve_spd(t.factor, t.B)


def residual(t: LemmaTriple, N) -> np.ndarray:
    """``M2(N) - M1``; positive semidefinite for every slack."""
    return sym(m2(t, N) - m1(t))


def completed_square(t: LemmaTriple, N) -> np.ndarray:
    """``(N - N*)^T C (N - N*)``, the closed form of :func:`residual`."""
    D = _check_slack(t, N) - n_star(t)
    return sym(D.T @ t.C @ D)


@dataclass(frozen=True)
class BoundProblem:
    """Data of ``-int_U z^T R z <= w^T (.) w`` given ``int_U z = M w`` and ``mu = |U|``."""

    M: np.ndarray
    R: np.ndarray
    mu: float

    def __post_init__(self):
        M, R = _mat(self.M, "M"), _mat(self.R, "R")
        _check_symmetric(R, "R")
        if M.shape[0] != R.shape[0]:
            raise DimensionMismatch(f"M has {M.shape[0]} rows but R is {R.shape[0]}x{R.shape[1]}")
        mu = float(self.mu)
        if not (mu >= 0.0 and math.isfinite(mu)):
            raise JensenGapError(f"mu must be finite and nonnegative, got {self.mu}")
        cholesky(R)
        M.setflags(write=False)
        R.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "mu", mu)

    def with_mu(self, mu: float) -> "BoundProblem":
        return BoundProblem(self.M, self.R, mu)


def rational_bound(p: BoundProblem) -> np.ndarray:
    """``-M^T R M / mu``: the classical Jensen bound, undefined at ``mu = 0``."""
    if p.mu == 0.0:
        raise ZeroMeasure("the rational bound is ill-posed on an interval of zero measure")
    return sym(-(p.M.T @ p.R @ p.M) / p.mu)


def _check_bound_slack(p, N):
    N = _mat(N, "N")
    if N.shape != p.M.shape:
        raise DimensionMismatch(f"slack must be {p.M.shape}, got {N.shape}")
    return N


def affine_bound(p: BoundProblem, N) -> np.ndarray:
    """``N^T M + M^T N + mu N^T R^{-1} N``; well defined for ``mu = 0``."""
    N = _check_bound_slack(p, N)
    L = cholesky(p.R)
    Y = solve_triangular(L, N, trans="T", lower=False)
    return sym(N.T @ p.M + p.M.T @ N + p.mu * (Y.T @ Y))


def optimal_N(p: BoundProblem) -> np.ndarray:
    """``-R M / mu``, the slack at which affine and rational bounds coincide."""
    if p.mu == 0.0:
        raise ZeroMeasure("no optimal slack on an interval of zero measure")
    return -(p.R @ p.M) / p.mu


def as_lemma_triple(p: BoundProblem, A=None) -> LemmaTriple:
    """The triple ``(A, M, mu R^{-1})`` behind the bound family."""
    if p.mu == 0.0:
        raise ZeroMeasure("C = mu R^{-1} is singular at mu = 0")
    k = p.M.shape[1]
    A = np.zeros((k, k)) if A is None else A
    L = cholesky(p.R)
    Rinv = _solve_spd(L, np.eye(p.R.shape[0]))
    return LemmaTriple(A, p.M, sym(p.mu * Rinv))


def _stack_difference(n):
    return np.hstack([np.eye(n), -np.eye(n)])


@dataclass(frozen=True)
class TrajectoryCheck:
    true_integral: float
    rational: float
    affine: float

    def ordered(self, tol: float = PSD_TOL) -> bool:
        return self.true_integral <= self.rational + tol and self.rational <= self.affine + tol


def trajectory_check(x: FunctionSpec, R, I, N=None, tol: float | None = None) -> TrajectoryCheck:
    """Evaluate the three members of ``true <= rational <= affine`` on a trajectory.

    ``z = x'`` on ``I = [t_k, t]``, ``w = (x(t), x(t_k))`` and ``M = [I, -I]``.
    ``N`` defaults to the optimal slack.
    """
    I = as_interval(I)
    n = x.dimension
    R = _mat(R, "R")
    p = BoundProblem(_stack_difference(n), R, I.measure())

    def quad_form(s):
        z = np.atleast_2d(x.derivative(s))
        return np.einsum("ik,ij,jk->k", z, R, z)

    true = -integrate_scalar(quad_form, I, x.breaks, tol, vectorized=True).value
    w = np.concatenate([np.atleast_1d(x(I.b)), np.atleast_1d(x(I.a))])
    rational = float(w @ rational_bound(p) @ w)
    slack = optimal_N(p) if N is None else N
    affine = float(w @ affine_bound(p, slack) @ w)
    return TrajectoryCheck(true, rational, affine)


@dataclass(frozen=True)
class SweepRow:
    mu: float
    affine_norm: float
    rational_norm: float
    affine_deviation: float

    def as_dict(self):
        return {"mu": self.mu, "affine_norm": self.affine_norm, "rational_norm": self.rational_norm}


SWEEP_COLUMNS = ("mu", "affine_norm", "rational_norm")


def wellposedness_sweep(M, R, N, mus: Sequence[float]) -> list[SweepRow]:
    """Frobenius norms of both bounds as the measure shrinks.

    ``rational_norm`` is ``inf`` at ``mu = 0``.  ``affine_deviation`` is
    ``||Q(mu) - Q(0)||_F``, which equals ``mu ||N^T R^{-1} N||_F``.
    """
    base = BoundProblem(M, R, 0.0)
    Q0 = affine_bound(base, N)
    rows = []
    for mu in mus:
        p = base.with_mu(mu)
        Q = affine_bound(p, N)
        rational = math.inf if p.mu == 0.0 else float(np.linalg.norm(rational_bound(p)))
        rows.append(SweepRow(p.mu, float(np.linalg.norm(Q)), rational,
                             float(np.linalg.norm(Q - Q0))))
    return rows


def slack_curvature(R, N) -> np.ndarray:
    """``N^T R^{-1} N``, the coefficient of ``mu`` in the affine bound."""
    R, N = _mat(R, "R"), _mat(N, "N")
    Y = solve_triangular(cholesky(R), N, trans="T", lower=False)
    return sym(Y.T @ Y)


class LiteratureBound(str, Enum):
    SEURET_SAMPLED = "seuret_sampled"
    HAN_DELAY = "han_delay"
    ZHANG_SUM = "zhang_sum"


def literature_instance(kind, R, mu: float, M=None) -> BoundProblem:
    """Bound problems sharing the affine shape of three published bounds.

    ``SEURET_SAMPLED`` (sampled-data, ``mu = t - t_k``) fixes ``M = [I, -I]``.
    ``HAN_DELAY`` (``mu = tau``) and ``ZHANG_SUM`` (``mu = h``, a sum over
    ``h`` samples) take the constraint matrix from the caller.
    """
    kind = LiteratureBound(kind)
    R = _mat(R, "R")
    if kind is LiteratureBound.SEURET_SAMPLED:
        if M is not None and not np.array_equal(_mat(M), _stack_difference(R.shape[0])):
            raise DimensionMismatch("the sampled-data bound uses M = [I, -I]")
        M = _stack_difference(R.shape[0])
    elif M is None:
        raise DimensionMismatch(f"{kind.value} needs a caller-supplied constraint matrix M")
    return BoundProblem(M, R, mu)


def discrete_trajectory_check(y, R, M, w, N=None, tol: float = 1e-10) -> TrajectoryCheck:
    """Discrete analogue of :func:`trajectory_check` with ``mu = len(y)``.

    Requires ``sum y = M w``; raises ConstraintViolated otherwise.
    """
    Y = np.asarray(y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    w = np.atleast_1d(np.asarray(w, dtype=float))
    R, M = _mat(R, "R"), _mat(M, "M")
    if M.shape[1] != w.size or M.shape[0] != Y.shape[1]:
        raise DimensionMismatch(f"M is {M.shape}, w has {w.size} entries, y has {Y.shape[1]}")
    residual_ = Y.sum(axis=0) - M @ w
    if np.max(np.abs(residual_)) > tol:
        raise ConstraintViolated(f"sum of samples differs from M w by {residual_}")
    p = BoundProblem(M, R, Y.shape[0])
    true = -float(np.einsum("ki,ij,kj->", Y, R, Y))
    rational = float(w @ rational_bound(p) @ w)
    slack = optimal_N(p) if N is None else N
    affine = float(w @ affine_bound(p, slack) @ w)
    return TrajectoryCheck(true, rational, affine)


def random_spd(rng: np.random.Generator, n: int, shift: float = 0.1) -> np.ndarray:
    """``G^T G + shift I`` with uniform ``G``."""
    G = rng.uniform(-1.0, 1.0, size=(n, n))
    return G.T @ G + shift * np.eye(n)


def random_triple(rng: np.random.Generator, max_dim: int = 6) -> LemmaTriple:
    n = int(rng.integers(1, max_dim + 1))
    m = int(rng.integers(1, max_dim + 1))
    A = sym(rng.uniform(-1.0, 1.0, size=(n, n)))
    B = rng.uniform(-1.0, 1.0, size=(m, n))
    return LemmaTriple(A, B, random_spd(rng, m))


@dataclass(frozen=True)
class LemmaSuiteResult:
    trials: int
    max_minimizer_error: float
    min_residual_eig: float
    max_identity_error: float

    def passed(self, tol: float = PSD_TOL) -> bool:
        return (self.max_minimizer_error <= tol and self.min_residual_eig >= -tol
                and self.max_identity_error <= tol)


def lemma_suite(seed: int, trials: int = 100, max_dim: int = 6, slacks: int = 10) -> LemmaSuiteResult:
    """Randomized check of the completion-of-squares identities.

    For each triple: ``||M2(N*) - M1||_F``, ``min_eig(M2(N) - M1)`` and the
    gap between the residual and its completed-square form, over
    ``slacks`` random ``N``.
    """
    if trials < 1:
        raise JensenGapError("the suite needs at least one trial")
    rng = np.random.default_rng(seed)
    worst_min = 0.0
    worst_eig = math.inf
    worst_id = 0.0
    for _ in range(trials):
        t = random_triple(rng, max_dim)
        worst_min = max(worst_min, float(np.linalg.norm(m2(t, n_star(t)) - m1(t))))
        for _ in range(slacks):
            N = rng.uniform(-2.0, 2.0, size=t.B.shape)
            res = residual(t, N)
            worst_eig = min(worst_eig, min_eig(res))
            worst_id = max(worst_id, float(np.linalg.norm(res - completed_square(t, N))))
    return LemmaSuiteResult(trials, worst_min, worst_eig, worst_id)
