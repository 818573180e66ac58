"""Adaptive quadrature and bracketing root finding.

Both routines accept plain Python callables.  Integrands are first tried
with a numpy array of nodes; a callable that cannot take arrays is wrapped
with :func:`numpy.vectorize` transparently.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from .exceptions import NoSignChange, NonConvergence, NonFinite

__all__ = [
    "QuadratureSpec",
    "Bracket",
    "DEFAULT_QUADRATURE",
    "integrate",
    "find_root",
    "cumulative_integral",
]

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[1:7:2] = _WG[:3]
_GAUSS[7] = _WG[3]
_GAUSS[9:14:2] = _WG[:3][::-1]

_MAX_INTERVALS = 20000


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for :func:`integrate`.

    The routine stops once the summed error estimate is at most
    ``max(abs_tol, rel_tol * |I|)``.  ``max_depth`` caps how many times a
    single subinterval may be bisected.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_depth: int = 60

    def __post_init__(self):
        if not self.rel_tol > 0 or not self.abs_tol > 0:
            raise ValueError("tolerances must be positive")
        if self.max_depth < 10:
            raise ValueError("max_depth must be at least 10")


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty bracket [{self.lo}, {self.hi}]")


DEFAULT_QUADRATURE = QuadratureSpec()


def _as_array_function(g: Callable) -> Callable[[np.ndarray], np.ndarray]:
    probe = np.array([0.25, 0.5])

    def wrapped_vec(x):
        return np.broadcast_to(np.asarray(g(x), dtype=float), x.shape)

    vec = np.vectorize(g, otypes=[float])
    try:
        with np.errstate(all="ignore"):
            out = np.asarray(g(probe), dtype=float)
        if out.shape in ((), (2,)):
            return wrapped_vec
    except (TypeError, ValueError):
        pass
    return vec


def _gk15(g, a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + half * _NODES
    with np.errstate(all="ignore"):
        fx = g(x)
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx)][0]
        raise NonFinite(f"integrand is not finite at t={bad!r}")
    kron = half * float(np.dot(_KRONROD, fx))
    gauss = half * float(np.dot(_GAUSS, fx))
    return kron, abs(kron - gauss)


def integrate(g: Callable, a: float, b: float,
              spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Integrate ``g`` over ``[a, b]`` by globally adaptive Gauss-Kronrod.

    The interval with the largest error estimate is bisected until the
    total estimate meets the tolerance.  Nodes never touch the endpoints, so
    an integrable logarithmic singularity at ``a`` or ``b`` is handled by
    repeated bisection toward it.

    Raises
    ------
    NonConvergence
        If an interval would need more than ``spec.max_depth`` bisections.
    NonFinite
        If ``g`` returns NaN or infinity at a node.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    if a > b:
        raise ValueError(f"integration limits out of order: {a} > {b}")
    fn = _as_array_function(g)

    total, err = _gk15(fn, a, b)
    # Heap of (-error, left, right, value, depth).
    heap = [(-err, a, b, total, 0)]
    total_err = err
    while total_err > max(spec.abs_tol, spec.rel_tol * abs(total)):
        neg_err, lo, hi, val, depth = heapq.heappop(heap)
        if depth >= spec.max_depth or len(heap) > _MAX_INTERVALS:
            raise NonConvergence(
                f"quadrature on [{a}, {b}] stalled with error estimate "
                f"{total_err:.3e} near [{lo}, {hi}]")
        mid = 0.5 * (lo + hi)
        left, e_left = _gk15(fn, lo, mid)
        right, e_right = _gk15(fn, mid, hi)
        total += left + right - val
        total_err += e_left + e_right + neg_err
        heapq.heappush(heap, (-e_left, lo, mid, left, depth + 1))
        heapq.heappush(heap, (-e_right, mid, hi, right, depth + 1))
        if total_err < 0:
            # Guard against cancellation drift in the running sum.
            total_err = sum(-item[0] for item in heap)
    # Re-sum from the leaves; the running total accumulates rounding.
    return float(sum(item[3] for item in heap))


def cumulative_integral(g: Callable, grid: np.ndarray, order: int = 8) -> np.ndarray:
    """Cumulative integral of ``g`` from ``grid[0]`` to each grid point.

    Each panel uses a fixed Gauss-Legendre rule, so this is meant for smooth
    integrands on fine grids.  ``g`` must accept numpy arrays.
    """
    grid = np.asarray(grid, dtype=float)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    left, right = grid[:-1], grid[1:]
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    x = mid[:, None] + half[:, None] * nodes[None, :]
    fx = np.asarray(g(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        raise NonFinite("integrand is not finite on the tabulation grid")
    panels = half * (fx @ weights)
    return np.concatenate([[0.0], np.cumsum(panels)])


def find_root(g: Callable[[float], float], bracket: Bracket,
              tol: float = 1e-12, maxiter: int = 200) -> float:
    """Root of ``g`` inside ``bracket`` by Brent's method.

    Raises :class:`NoSignChange` when ``g`` does not change sign across the
    bracket and :class:`NonConvergence` after ``maxiter`` iterations.
    """
    lo, hi = float(bracket.lo), float(bracket.hi)
    g_lo, g_hi = float(g(lo)), float(g(hi))
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if np.sign(g_lo) == np.sign(g_hi):
        raise NoSignChange(
            f"g({lo}) = {g_lo:.6g} and g({hi}) = {g_hi:.6g} have the same sign")
    try:
        root, info = optimize.brentq(lambda s: float(g(s)), lo, hi, xtol=tol,
                                     maxiter=maxiter, full_output=True)
    except RuntimeError as exc:
        raise NonConvergence(str(exc)) from exc
    if not info.converged:
        raise NonConvergence(f"brentq did not converge: {info.flag}")
    return float(root)
