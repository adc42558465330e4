"""Catalog of vector-valued test functions with closed-form oracles.

Every function maps a real interval into R^n and knows, analytically,

* its value and derivative (``f(t)``, ``f.derivative(t)``),
* the integral of each component over an interval,
* the Gram matrix ``G_ij = int f_i f_j`` (so ``int f^T f = trace(G)``),
* componentwise extrema and the supremum of ``|f'|`` over an interval.

Values at a jump follow the right-limit convention.  Extrema are taken
pointwise over the closed interval, so a fragment ending exactly on a jump
sees the value on the other side of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .errors import DimensionMismatch, DiscontinuityInside, JensenGapError

__all__ = [
    "Interval",
    "FunctionSpec",
    "Exponential",
    "Signum",
    "Polynomial",
    "Sine",
    "PiecewiseLinear",
    "Linear",
    "reduce_quadratic",
    "as_interval",
]


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise JensenGapError(f"interval endpoints must be finite, got [{a}, {b}]")
        if a > b:
            raise JensenGapError(f"interval must satisfy a <= b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def measure(self) -> float:
        return self.b - self.a

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    def __iter__(self):
        yield self.a
        yield self.b


def as_interval(I) -> Interval:
    if isinstance(I, Interval):
        return I
    a, b = I
    return Interval(a, b)


def _tuple(x) -> tuple:
    return tuple(float(v) for v in np.atleast_1d(np.asarray(x, dtype=float)))


def _int_exp(rate, a, h):
    """Integral of exp(rate*t) over [a, a+h]; stable as rate -> 0."""
    return np.exp(rate * a) * h * special.exprel(rate * h)


def _int_cos(k, c, a, b):
    """Integral of cos(k*t + c) over [a, b]; stable as k -> 0."""
    h = b - a
    m = 0.5 * (a + b)
    return h * np.cos(k * m + c) * np.sinc(k * h / (2.0 * np.pi))


class FunctionSpec:
    """Base class for catalog functions ``f: R -> R^n``.

    Subclasses provide ``_eval``, ``_deriv``, ``_integral``, ``_gram``,
    ``_extrema`` and ``_deriv_sup``.  The public methods accept an
    :class:`Interval` or any ``(a, b)`` pair.
    """

    dimension: int
    discontinuities: tuple = ()

    @property
    def kinks(self) -> tuple:
        """Points where the function is continuous but not differentiable."""
        return ()

    @property
    def breaks(self) -> tuple:
        """All non-smooth points, sorted; used to pre-split quadrature."""
        return tuple(sorted(set(self.discontinuities) | set(self.kinks)))

    def __call__(self, t):
        return self._eval(np.asarray(t, dtype=float))

    def derivative(self, t):
        return self._deriv(np.asarray(t, dtype=float))

    def integral(self, I) -> np.ndarray:
        I = as_interval(I)
        return np.asarray(self._integral(I.a, I.b), dtype=float)

    def gram(self, I) -> np.ndarray:
        I = as_interval(I)
        G = np.asarray(self._gram(I.a, I.b), dtype=float)
        return 0.5 * (G + G.T)

    def phi_integral(self, I) -> float:
        """Exact ``int_I f(s)^T f(s) ds``."""
        return float(np.trace(self.gram(I)))

    def extrema(self, I) -> tuple[np.ndarray, np.ndarray]:
        I = as_interval(I)
        if I.measure() <= 0:
            raise JensenGapError("extrema require an interval of positive measure")
        m, M = self._extrema(I.a, I.b)
        return np.asarray(m, dtype=float), np.asarray(M, dtype=float)

    def oscillation(self, I) -> np.ndarray:
        m, M = self.extrema(I)
        return M - m

    def jumps_inside(self, I) -> tuple:
        I = as_interval(I)
        return tuple(c for c in self.discontinuities if I.a < c < I.b)

    def deriv_sup(self, I) -> np.ndarray:
        """Componentwise ``sup_I |f'|`` in the weak sense.

        Raises :class:`DiscontinuityInside` if a jump lies strictly inside
        ``I``; the derivative bound is meaningless there.
        """
        I = as_interval(I)
        jumps = self.jumps_inside(I)
        if jumps:
            raise DiscontinuityInside(
                f"{type(self).__name__} jumps at {jumps[0]} inside [{I.a}, {I.b}]"
            )
        return np.asarray(self._deriv_sup(I.a, I.b), dtype=float)

    # generic numeric fallbacks, used by composed specs only

    def _pieces(self, a, b):
        cuts = [a] + [c for c in self.breaks if a < c < b] + [b]
        return list(zip(cuts[:-1], cuts[1:]))

    def _scan_extremes(self, func, a, b, samples=2049):
        """Componentwise (min, max) of ``func`` over ``[a, b]``.

        Dense sampling on each smooth piece followed by bounded local
        refinement.  Left limits at interior jumps are included since the
        supremum over the piece approaches them.
        """
        lo = np.full(self.dimension, np.inf)
        hi = np.full(self.dimension, -np.inf)
        for l, r in self._pieces(a, b):
            ts = np.linspace(l, r, samples)
            if r < b:
                ts[-1] = np.nextafter(r, -np.inf)
            vals = np.atleast_2d(func(ts))
            for i in range(self.dimension):
                row = vals[i]
                for sign in (1.0, -1.0):
                    k = int(np.argmax(sign * row))
                    best = row[k]
                    lk, rk = ts[max(k - 1, 0)], ts[min(k + 1, samples - 1)]
                    if rk > lk:
                        res = optimize.minimize_scalar(
                            lambda s: -sign * np.atleast_1d(func(s))[i],
                            bounds=(lk, rk),
                            method="bounded",
                            options={"xatol": 1e-14 * max(1.0, abs(rk))},
                        )
                        candidate = -sign * res.fun
                        if sign * candidate > sign * best:
                            best = candidate
                    if sign > 0:
                        hi[i] = max(hi[i], best)
                    else:
                        lo[i] = min(lo[i], best)
        return lo, hi

    def _extrema(self, a, b):
        return self._scan_extremes(self._eval, a, b)

    def _deriv_sup(self, a, b):
        lo, hi = self._scan_extremes(self._deriv, a, b)
        return np.maximum(np.abs(lo), np.abs(hi))

    def _gram(self, a, b):
        raise NotImplementedError

    def _integral(self, a, b):
        raise NotImplementedError


@dataclass(frozen=True, init=False)
class Exponential(FunctionSpec):
    """Components ``scale_i * exp(alpha_i * t)``."""

    alpha: tuple = (1.0,)
    scale: tuple = (1.0,)

    def __init__(self, alpha=1.0, scale=1.0):
        alpha, scale = np.broadcast_arrays(np.atleast_1d(alpha), np.atleast_1d(scale))
        object.__setattr__(self, "alpha", _tuple(alpha))
        object.__setattr__(self, "scale", _tuple(scale))

    @property
    def dimension(self):
        return len(self.alpha)

    def _arrays(self):
        return np.array(self.alpha), np.array(self.scale)

    def _eval(self, t):
        al, c = self._arrays()
        return c[:, None] * np.exp(np.multiply.outer(al, t)) if t.ndim else c * np.exp(al * t)

    def _deriv(self, t):
        al, c = self._arrays()
        return self.__class__(al, al * c)._eval(t)

    def _integral(self, a, b):
        al, c = self._arrays()
        return c * _int_exp(al, a, b - a)

    def _gram(self, a, b):
        al, c = self._arrays()
        rates = al[:, None] + al[None, :]
        return np.outer(c, c) * _int_exp(rates, a, b - a)

    def _extrema(self, a, b):
        # monotone in t, so the endpoints carry the extremes
        fa, fb = self._eval(np.float64(a)), self._eval(np.float64(b))
        return np.minimum(fa, fb), np.maximum(fa, fb)

    def _deriv_sup(self, a, b):
        da, db = self._deriv(np.float64(a)), self._deriv(np.float64(b))
        return np.maximum(np.abs(da), np.abs(db))


@dataclass(frozen=True)
class Signum(FunctionSpec):
    """``sgn(t - center)`` replicated on ``dimension`` components.

    ``f(center) = +1`` (right limit).
    """

    center: float = 0.0
    dimension: int = 1

    def __post_init__(self):
        if self.dimension < 1:
            raise JensenGapError("dimension must be positive")
        object.__setattr__(self, "center", float(self.center))

    @property
    def discontinuities(self):
        return (self.center,)

    def _eval(self, t):
        s = np.where(t >= self.center, 1.0, -1.0)
        return np.broadcast_to(s, (self.dimension,) + s.shape).copy()

    def _deriv(self, t):
        return np.zeros((self.dimension,) + t.shape)

    def _integral(self, a, b):
        c = self.center
        right = max(b - max(a, c), 0.0)
        left = max(min(b, c) - a, 0.0)
        return np.full(self.dimension, right - left)

    def _gram(self, a, b):
        return np.full((self.dimension, self.dimension), b - a)

    def _extrema(self, a, b):
        lo = 1.0 if a >= self.center else -1.0
        hi = 1.0 if b >= self.center else -1.0
        return np.full(self.dimension, lo), np.full(self.dimension, hi)

    def _deriv_sup(self, a, b):
        return np.zeros(self.dimension)


@dataclass(frozen=True, init=False)
class Polynomial(FunctionSpec):
    """Polynomial components; ``coeffs[i]`` lists ascending powers of ``t``."""

    coeffs: tuple = ((0.0,),)

    def __init__(self, coeffs):
        rows = [np.atleast_1d(np.asarray(c, dtype=float)) for c in coeffs]
        if not rows or any(r.size == 0 for r in rows):
            raise JensenGapError("each polynomial component needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(_tuple(r) for r in rows))

    @property
    def dimension(self):
        return len(self.coeffs)

    @property
    def _polys(self):
        return [np.polynomial.Polynomial(c) for c in self.coeffs]

    def _eval(self, t):
        return np.array([p(t) for p in self._polys])

    def _deriv(self, t):
        return np.array([p.deriv()(t) for p in self._polys])

    def _integral(self, a, b):
        out = []
        for p in self._polys:
            P = p.integ()
            out.append(P(b) - P(a))
        return np.array(out)

    def _gram(self, a, b):
        ps = self._polys
        n = len(ps)
        G = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                P = (ps[i] * ps[j]).integ()
                G[i, j] = G[j, i] = P(b) - P(a)
        return G

    @staticmethod
    def _interior_roots(p, a, b):
        if p.degree() < 1:
            return []
        roots = p.roots()
        real = roots[np.abs(roots.imag) <= 1e-12 * np.maximum(1.0, np.abs(roots))].real
        return [r for r in real if a < r < b]

    def _extrema(self, a, b):
        lo, hi = [], []
        for p in self._polys:
            ts = np.array([a, b] + self._interior_roots(p.deriv(), a, b))
            v = p(ts)
            lo.append(v.min())
            hi.append(v.max())
        return np.array(lo), np.array(hi)

    def _deriv_sup(self, a, b):
        out = []
        for p in self._polys:
            dp = p.deriv()
            ts = np.array([a, b] + self._interior_roots(dp.deriv(), a, b))
            out.append(np.abs(dp(ts)).max())
        return np.array(out)


@dataclass(frozen=True, init=False)
class Sine(FunctionSpec):
    """Components ``amplitude_i * sin(frequency_i * t + phase_i)``."""

    frequency: tuple = (1.0,)
    phase: tuple = (0.0,)
    amplitude: tuple = (1.0,)

    def __init__(self, frequency=1.0, phase=0.0, amplitude=1.0):
        w, p, A = np.broadcast_arrays(
            np.atleast_1d(frequency), np.atleast_1d(phase), np.atleast_1d(amplitude)
        )
        object.__setattr__(self, "frequency", _tuple(w))
        object.__setattr__(self, "phase", _tuple(p))
        object.__setattr__(self, "amplitude", _tuple(A))

    @property
    def dimension(self):
        return len(self.frequency)

    def _arrays(self):
        return np.array(self.frequency), np.array(self.phase), np.array(self.amplitude)

    def _eval(self, t):
        w, p, A = self._arrays()
        if t.ndim:
            return A[:, None] * np.sin(np.multiply.outer(w, t) + p[:, None])
        return A * np.sin(w * t + p)

    def _deriv(self, t):
        w, p, A = self._arrays()
        return Sine(w, p + 0.5 * np.pi, A * w)._eval(t)

    def _integral(self, a, b):
        w, p, A = self._arrays()
        # sin(x) = cos(x - pi/2)
        return A * _int_cos(w, p - 0.5 * np.pi, a, b)

    def _gram(self, a, b):
        w, p, A = self._arrays()
        dw = w[:, None] - w[None, :]
        sw = w[:, None] + w[None, :]
        dp = p[:, None] - p[None, :]
        sp = p[:, None] + p[None, :]
        body = 0.5 * (_int_cos(dw, dp, a, b) - _int_cos(sw, sp, a, b))
        return np.outer(A, A) * body

    @staticmethod
    def _phase_hits(w, p, a, b, offset):
        """Points t in (a, b) where ``w*t + p = offset + k*pi``."""
        if w == 0.0:
            return []
        u0, u1 = sorted((w * a + p, w * b + p))
        k0 = math.ceil((u0 - offset) / math.pi)
        k1 = math.floor((u1 - offset) / math.pi)
        if k1 - k0 > 3:
            k1 = k0 + 3  # a full period is enough to hit both signs
        hits = [((offset + k * math.pi) - p) / w for k in range(k0, k1 + 1)]
        return [t for t in hits if a < t < b]

    def _extrema(self, a, b):
        lo, hi = [], []
        for w, p, A in zip(self.frequency, self.phase, self.amplitude):
            ts = np.array([a, b] + self._phase_hits(w, p, a, b, 0.5 * math.pi))
            v = A * np.sin(w * ts + p)
            lo.append(v.min())
            hi.append(v.max())
        return np.array(lo), np.array(hi)

    def _deriv_sup(self, a, b):
        out = []
        for w, p, A in zip(self.frequency, self.phase, self.amplitude):
            ts = np.array([a, b] + self._phase_hits(w, p, a, b, 0.0))
            out.append(np.abs(A * w * np.cos(w * ts + p)).max())
        return np.array(out)


@dataclass(frozen=True, init=False)
class PiecewiseLinear(FunctionSpec):
    """Linear interpolation through ``(breakpoints[k], values[i][k])``.

    Held constant outside ``[breakpoints[0], breakpoints[-1]]``.
    """

    breakpoints: tuple = (0.0, 1.0)
    values: tuple = ((0.0, 0.0),)

    def __init__(self, breakpoints, values):
        x = np.asarray(breakpoints, dtype=float)
        y = np.atleast_2d(np.asarray(values, dtype=float))
        if x.ndim != 1 or x.size < 2 or np.any(np.diff(x) <= 0):
            raise JensenGapError("breakpoints must be strictly increasing, at least two")
        if y.shape[1] != x.size:
            raise DimensionMismatch(
                f"values have {y.shape[1]} columns but there are {x.size} breakpoints"
            )
        object.__setattr__(self, "breakpoints", _tuple(x))
        object.__setattr__(self, "values", tuple(_tuple(row) for row in y))

    @property
    def dimension(self):
        return len(self.values)

    @property
    def kinks(self):
        return self.breakpoints

    def _eval(self, t):
        x = self.breakpoints
        out = np.array([np.interp(t, x, y) for y in self.values])
        return out

    def _segment_slopes(self):
        x = np.array(self.breakpoints)
        y = np.array(self.values)
        return np.diff(y, axis=1) / np.diff(x)

    def _deriv(self, t):
        x = np.array(self.breakpoints)
        slopes = self._segment_slopes()
        # right-derivative convention: segment index of [x_k, x_{k+1})
        k = np.searchsorted(x, t, side="right") - 1
        inside = (k >= 0) & (k < len(x) - 1)
        kk = np.clip(k, 0, len(x) - 2)
        return np.where(inside, slopes[:, kk], 0.0)

    def _nodes(self, a, b):
        return np.array([a] + [c for c in self.breakpoints if a < c < b] + [b])

    def _integral(self, a, b):
        ts = self._nodes(a, b)
        v = self._eval(ts)
        return 0.5 * np.sum((v[:, 1:] + v[:, :-1]) * np.diff(ts), axis=1)

    def _gram(self, a, b):
        # products of linear pieces are quadratic: Simpson is exact per piece
        ts = self._nodes(a, b)
        l, r = ts[:-1], ts[1:]
        vl, vr, vm = self._eval(l), self._eval(r), self._eval(0.5 * (l + r))
        h = r - l
        return (
            np.einsum("ik,jk,k->ij", vl, vl, h)
            + 4.0 * np.einsum("ik,jk,k->ij", vm, vm, h)
            + np.einsum("ik,jk,k->ij", vr, vr, h)
        ) / 6.0

    def _extrema(self, a, b):
        v = self._eval(self._nodes(a, b))
        return v.min(axis=1), v.max(axis=1)

    def _deriv_sup(self, a, b):
        # weak sense: at a kink in [a, b] both one-sided slopes count
        x = np.array(self.breakpoints)
        slopes = np.abs(self._segment_slopes())
        lefts = np.concatenate([[-np.inf], x])
        rights = np.concatenate([x, [np.inf]])
        padded = np.concatenate(
            [np.zeros((self.dimension, 1)), slopes, np.zeros((self.dimension, 1))], axis=1
        )
        touching = (lefts <= b) & (rights >= a)
        return padded[:, touching].max(axis=1)


@dataclass(frozen=True, eq=False)
class Linear(FunctionSpec):
    """The composed spec ``t -> L @ base(t)``."""

    matrix: np.ndarray = field(repr=False)
    base: FunctionSpec = None

    def __post_init__(self):
        L = np.atleast_2d(np.asarray(self.matrix, dtype=float)).copy()
        if L.shape[1] != self.base.dimension:
            raise DimensionMismatch(
                f"matrix has {L.shape[1]} columns, base function has dimension "
                f"{self.base.dimension}"
            )
        L.setflags(write=False)
        object.__setattr__(self, "matrix", L)

    @property
    def dimension(self):
        return self.matrix.shape[0]

    @property
    def discontinuities(self):
        return self.base.discontinuities

    @property
    def kinks(self):
        return self.base.kinks

    def _is_diagonal(self):
        L = self.matrix
        return L.shape[0] == L.shape[1] and np.all(L == np.diag(np.diag(L)))

    def _eval(self, t):
        return np.tensordot(self.matrix, self.base._eval(t), axes=1)

    def _deriv(self, t):
        return np.tensordot(self.matrix, self.base._deriv(t), axes=1)

    def _integral(self, a, b):
        return self.matrix @ self.base._integral(a, b)

    def _gram(self, a, b):
        L = self.matrix
        return L @ self.base._gram(a, b) @ L.T

    def _extrema(self, a, b):
        if self._is_diagonal():
            d = np.diag(self.matrix)
            m, M = self.base._extrema(a, b)
            return np.minimum(d * m, d * M), np.maximum(d * m, d * M)
        return super()._extrema(a, b)

    def _deriv_sup(self, a, b):
        if self._is_diagonal():
            return np.abs(np.diag(self.matrix)) * self.base._deriv_sup(a, b)
        return super()._deriv_sup(a, b)


def reduce_quadratic(Q, f: FunctionSpec) -> FunctionSpec:
    """Map ``phi_Q`` onto ``phi_I``: returns ``L f`` where ``Q = L^T L``.

    Gaps of the result under ``z^T z`` equal gaps of ``f`` under
    ``z^T Q z``.
    """
    from .matrix import cholesky

    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if Q.shape != (f.dimension, f.dimension):
        raise DimensionMismatch(
            f"Q is {Q.shape[0]}x{Q.shape[1]} but f has dimension {f.dimension}"
        )
    L = cholesky(Q)
    if np.array_equal(L, np.eye(f.dimension)):
        return f
    return Linear(L, f)
