"""Adaptive Simpson quadrature, used as an independent integration oracle.

The interval is pre-split at caller-supplied breakpoints so that the
integrand is smooth on every panel.  Panels are refined breadth-first and
in bulk, so ``g`` is called on arrays of abscissae whenever it allows it.
"""

from __future__ import annotations

import os
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import JensenGapError, MaxDepthExceeded
from .functions import FunctionSpec, as_interval

MAX_DEPTH = 60
_EPS = np.finfo(float).eps


def default_tol() -> float:
    """Absolute tolerance, overridable through ``JGL_DEFAULT_TOL``."""
    raw = os.environ.get("JGL_DEFAULT_TOL")
    if raw is None:
        return 1e-10
    tol = float(raw)
    if not tol > 0:
        raise JensenGapError(f"JGL_DEFAULT_TOL must be positive, got {raw!r}")
    return tol


class QuadResult(NamedTuple):
    value: float
    error_estimate: float
    subdivisions: int


def _vectorize(g, vectorized):
    if vectorized:
        return lambda x: np.asarray(g(x), dtype=float)
    return lambda x: np.array([g(float(s)) for s in x], dtype=float)


def integrate_scalar(
    g: Callable,
    I,
    breakpoints: Sequence[float] = (),
    tol: float | None = None,
    *,
    rel_tol: float = 1e-13,
    vectorized: bool = False,
) -> QuadResult:
    """Integrate ``g`` over ``I`` by adaptive Simpson with Richardson correction.

    Parameters
    ----------
    g : callable
        Real integrand.  With ``vectorized=True`` it must accept a 1-D array.
    I : Interval or (a, b)
    breakpoints : sequence of float
        Points inside ``I`` where ``g`` may be non-smooth; panels never
        straddle them.
    tol : float
        Absolute tolerance on the whole integral; each panel receives a
        share proportional to its width.
    rel_tol : float
        Relative floor, applied against a coarse estimate of ``int |g|``,
        so large integrands do not chase unreachable absolute accuracy.

    Raises
    ------
    MaxDepthExceeded
        If a panel is still unresolved after ``MAX_DEPTH`` halvings, or
        shrinks below floating resolution first (an undeclared jump).
    """
    I = as_interval(I)
    tol = default_tol() if tol is None else float(tol)
    if not tol > 0:
        raise JensenGapError(f"tol must be positive, got {tol}")
    a, b = I.a, I.b
    width = b - a
    if width == 0:
        return QuadResult(0.0, 0.0, 1)
    gv = _vectorize(g, vectorized)

    cuts = np.array([a] + sorted({float(c) for c in breakpoints if a < c < b}) + [b])
    left = cuts[:-1]
    right = cuts[1:]
    fl = gv(left)
    # panels end on a left limit: a jump at a cut or at b must not leak in
    fr = gv(np.nextafter(right, -np.inf))
    mid = 0.5 * (left + right)
    fm = gv(mid)
    whole = (right - left) / 6.0 * (fl + 4.0 * fm + fr)

    # coarse magnitude estimate for the relative floor
    xs = np.linspace(a, b, 65)
    scale = float(np.mean(np.abs(gv(xs)))) * width
    tol = max(tol, rel_tol * scale)

    depth = 0
    total = 0.0
    err = 0.0
    roundoff = 0.0
    accepted = 0
    while left.size:
        if depth > MAX_DEPTH:
            raise MaxDepthExceeded(
                f"adaptive Simpson exceeded depth {MAX_DEPTH} on [{a}, {b}]",
                location=float(left[0]),
            )
        lm = 0.5 * (left + mid)
        rm = 0.5 * (mid + right)
        collapsed = (lm <= left) | (rm >= right)
        if np.any(collapsed):
            # no representable interior points left: the panel cannot be resolved
            raise MaxDepthExceeded(
                f"adaptive Simpson panel collapsed to floating resolution on [{a}, {b}]",
                location=float(left[np.argmax(collapsed)]),
            )
        flm = gv(lm)
        frm = gv(rm)
        h = right - left
        # actual half widths: the rounded midpoint rarely splits h exactly
        sl = (mid - left) / 6.0 * (fl + 4.0 * flm + fm)
        sr = (right - mid) / 6.0 * (fm + 4.0 * frm + fr)
        two = sl + sr
        delta = two - whole
        budget = 15.0 * tol * h / width
        done = np.abs(delta) <= budget
        if np.any(done):
            total += float(np.sum(two[done] + delta[done] / 15.0))
            err += float(np.sum(np.abs(delta[done]))) / 15.0
            roundoff += float(np.sum(np.abs(two[done])))
            accepted += int(np.count_nonzero(done))
        keep = ~done
        if not np.any(keep):
            break
        left, mid, right = left[keep], mid[keep], right[keep]
        fl, fm, fr = fl[keep], fm[keep], fr[keep]
        flm, frm = flm[keep], frm[keep]
        lm, rm = lm[keep], rm[keep]
        sl, sr = sl[keep], sr[keep]
        left, mid, right, fl, fm, fr, whole = (
            np.concatenate([left, mid]),
            np.concatenate([lm, rm]),
            np.concatenate([mid, right]),
            np.concatenate([fl, fm]),
            np.concatenate([flm, frm]),
            np.concatenate([fm, fr]),
            np.concatenate([sl, sr]),
        )
        depth += 1

    err += 8.0 * _EPS * (roundoff + abs(total))
    return QuadResult(total, float(err), max(accepted, 1))


def integrate_vector(f: FunctionSpec, I, tol: float | None = None) -> np.ndarray:
    """Componentwise quadrature of ``f`` over ``I``, split at its non-smooth points."""
    I = as_interval(I)
    out = np.empty(f.dimension)
    for i in range(f.dimension):
        out[i] = integrate_scalar(
            lambda s, i=i: np.atleast_2d(f(s))[i], I, f.breaks, tol, vectorized=True
        ).value
    return out


def integrate_phi(f: FunctionSpec, I, tol: float | None = None) -> float:
    """Quadrature of ``s -> f(s)^T f(s)`` over ``I``."""
    I = as_interval(I)

    def phi(s):
        v = np.atleast_2d(f(s))
        return np.sum(v * v, axis=0)

    return integrate_scalar(phi, I, f.breaks, tol, vectorized=True).value
