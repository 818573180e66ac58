"""Sifting functions of the one- and two-dimensional DHR sieve.

The upper and lower functions ``F_k``, ``f_k`` solve the coupled system

    (s^k F(s))' = k s^(k-1) f(s-1)   for s > alpha_k,
    (s^k f(s))' = k s^(k-1) F(s-1)   for s > beta_k,

with ``F = 1/sigma_k`` on ``(0, alpha_k]`` and ``f = 0`` on ``(0, beta_k]``.
For k = 1 the crossing values are both 2; for k = 2 they are
``alpha_2 = 5.3577`` and ``beta_2 = 4.2664`` (five digits).

Elementary pieces are evaluated in closed form.  Each piece defined by an
integral is tabulated once as a cumulative integral on a fine uniform grid
and interpolated with cubic Hermite splines whose slopes are the exact
integrands.  An evaluator is immutable after construction.

Ranges covered: ``f1`` on (0, 6], ``F1`` on (0, 5], ``f2`` on (0, 6],
``F2`` on (0, 7) and ``sigma2`` on (0, alpha_2].
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .exceptions import DomainError
from .numerics import DEFAULT_QUADRATURE, QuadratureSpec, cumulative_integral, integrate

__all__ = [
    "EULER_GAMMA",
    "SieveConstants",
    "SieveFunctions",
    "default_evaluator",
    "method_of_steps",
    "march_sigma",
]

EULER_GAMMA = 0.577215664901532860606512

_E_GAMMA = math.exp(EULER_GAMMA)
_E_2GAMMA = math.exp(2 * EULER_GAMMA)
_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class SieveConstants:
    gamma: float = EULER_GAMMA
    alpha2: float = 5.3577
    beta2: float = 4.2664

    def __post_init__(self):
        if not self.beta2 < self.alpha2:
            raise ValueError("beta2 must lie below alpha2")
        # f2 on (beta2, 6] reads F2 up to 5, which must still be closed form.
        if not (4.0 < self.beta2 and self.alpha2 >= 5.0):
            raise ValueError("crossing values incompatible with one-step continuation")


class _Table:
    """Cumulative integral of ``integrand`` from ``a`` on a uniform grid."""

    def __init__(self, name: str, integrand: Callable, a: float, b: float, step: float):
        n = max(8, math.ceil((b - a) / step))
        grid = np.linspace(a, b, n + 1)
        self.name = name
        self.a, self.b = a, b
        self.integrand = integrand
        values = cumulative_integral(integrand, grid)
        self._spline = CubicHermiteSpline(grid, values, integrand(grid))

    def __call__(self, s):
        return self._spline(s)

    def validate(self, quad: QuadratureSpec, rng: np.random.Generator,
                 points: int = 100, tol: float = 1e-8) -> float:
        """Max deviation from direct adaptive quadrature at random points."""
        worst = 0.0
        for s in rng.uniform(self.a, self.b, size=points):
            direct = integrate(self.integrand, self.a, s, quad)
            worst = max(worst, abs(float(self(s)) - direct))
        if worst > tol:
            raise RuntimeError(
                f"table {self.name} deviates from direct quadrature by {worst:.3e}")
        return worst


def _log_ratio_integrand(t):
    # d/dt of the inner integral in F1 on (3, 5].
    return np.log(t - 2.0) / (t - 1.0)


def _sigma2_third_integrand(t):
    return (2.0 * (t - 3.0) ** 2 - (t - 2.0) ** 2 * np.log((t - 2.0) / 2.0)) / t ** 3


def _scalar_or_array(func):
    @functools.wraps(func)
    def wrapper(self, s):
        arr = np.asarray(s, dtype=float)
        out = func(self, np.atleast_1d(arr))
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)
    return wrapper


def _check_domain(name: str, s: np.ndarray, hi: float, closed: bool = True) -> None:
    bad = (s <= 0) | ((s > hi) if closed else (s >= hi)) | ~np.isfinite(s)
    if np.any(bad):
        bracket = "]" if closed else ")"
        raise DomainError(
            f"{name}({float(s[bad][0])!r}) is outside the implemented range (0, {hi}{bracket}")


@dataclass(frozen=True, eq=False)
class SieveFunctions:
    """Evaluator for ``sigma2``, ``f1``, ``F1``, ``f2`` and ``F2``.

    Construction tabulates the four integral-defined pieces (``F1`` on
    (3, 5], ``f1`` on (4, 6], ``f2`` on (beta_2, 6], ``F2`` on (alpha_2, 7))
    plus the inner integral of ``sigma2`` on (4, alpha_2].  With
    ``validate=True`` every table is checked against direct adaptive
    quadrature at 100 random points before the object is returned.
    """

    constants: SieveConstants = field(default_factory=SieveConstants)
    quad: QuadratureSpec = DEFAULT_QUADRATURE
    step: float = 5e-4
    validate: bool = True
    seed: int = 20240601

    def __post_init__(self):
        c = self.constants
        a2, b2 = c.alpha2, c.beta2
        set_ = functools.partial(object.__setattr__, self)
        # Order matters: each table only calls pieces built before it.
        set_("_F1_inner", _Table("F1", _log_ratio_integrand, 3.0, 5.0, self.step))
        set_("_f1_inner", _Table("f1", lambda t: self.F1(t - 1.0), 4.0, 6.0, self.step))
        set_("_sigma2_inner", _Table("sigma2", _sigma2_third_integrand, 4.0, a2, self.step))
        set_("_f2_inner", _Table("f2", lambda v: v * self.F2(v - 1.0), b2, 6.0, self.step))
        set_("_F2_anchor", a2 * a2 * float(self._F2_piece3(np.array([a2]))[0]))
        set_("_F2_inner", _Table("F2", lambda t: t * self.f2(t - 1.0), a2, 7.0, self.step))
        if self.validate:
            rng = np.random.default_rng(self.seed)
            errors = {t.name: t.validate(self.quad, rng) for t in self.tables()}
            set_("table_errors", errors)
        else:
            set_("table_errors", {})

    def tables(self):
        return (self._F1_inner, self._f1_inner, self._sigma2_inner,
                self._f2_inner, self._F2_inner)

    # -- individual pieces; each formula may be evaluated slightly outside
    # -- its own range so that junctions can be compared.

    @staticmethod
    def _F1_piece1(s):
        return 2.0 * _E_GAMMA / s

    def _F1_piece2(self, s):
        return 2.0 * _E_GAMMA / s * (1.0 + self._F1_inner(s))

    @staticmethod
    def _f1_piece2(s):
        return 2.0 * _E_GAMMA * np.log(s - 1.0) / s

    def _f1_piece3(self, s):
        # s f1(s) = 4 f1(4) + int_4^s F1(t-1) dt and 4 f1(4) = 2 e^g log 3.
        return (2.0 * _E_GAMMA * math.log(3.0) + self._f1_inner(s)) / s

    @staticmethod
    def _F2_piece1(s):
        return 8.0 * _E_2GAMMA / s ** 2

    @staticmethod
    def _F2_piece2(s):
        return 4.0 * _E_2GAMMA / (2.0 * (s - 1.0) ** 2 - s ** 2 * np.log(s / 2.0))

    def _F2_piece3(self, s):
        denom = ((9.0 - 8.0 * _LOG2) * s ** 2 / (32.0 * _E_2GAMMA)
                 - s ** 2 / (2.0 * _E_2GAMMA) * self._sigma2_inner(s))
        return 1.0 / denom

    def _F2_piece4(self, s):
        return (self._F2_anchor + 2.0 * self._F2_inner(s)) / s ** 2

    def _f2_piece2(self, s):
        return 2.0 * self._f2_inner(s) / s ** 2

    # -- public functions

    @_scalar_or_array
    def F1(self, s):
        """Upper linear-sieve function on (0, 5]."""
        _check_domain("F1", s, 5.0)
        out = np.empty_like(s)
        lo = s <= 3.0
        out[lo] = self._F1_piece1(s[lo])
        out[~lo] = self._F1_piece2(s[~lo])
        return out

    @_scalar_or_array
    def f1(self, s):
        """Lower linear-sieve function on (0, 6]."""
        _check_domain("f1", s, 6.0)
        out = np.zeros_like(s)
        mid = (s > 2.0) & (s <= 4.0)
        hi = s > 4.0
        out[mid] = self._f1_piece2(s[mid])
        out[hi] = self._f1_piece3(s[hi])
        return out

    @_scalar_or_array
    def F2(self, s):
        """Upper two-dimensional sieve function on (0, 7)."""
        _check_domain("F2", s, 7.0, closed=False)
        a2 = self.constants.alpha2
        out = np.empty_like(s)
        pieces = ((s <= 2.0, self._F2_piece1),
                  ((s > 2.0) & (s <= 4.0), self._F2_piece2),
                  ((s > 4.0) & (s <= a2), self._F2_piece3),
                  (s > a2, self._F2_piece4))
        for mask, piece in pieces:
            if np.any(mask):
                out[mask] = piece(s[mask])
        return out

    @_scalar_or_array
    def f2(self, s):
        """Lower two-dimensional sieve function on (0, 6]."""
        _check_domain("f2", s, 6.0)
        out = np.zeros_like(s)
        hi = s > self.constants.beta2
        if np.any(hi):
            out[hi] = self._f2_piece2(s[hi])
        return out

    @_scalar_or_array
    def sigma2(self, s):
        """``sigma_2 = 1/F_2`` on (0, alpha_2]."""
        _check_domain("sigma2", s, self.constants.alpha2)
        return 1.0 / self.F2(s)

    def dde_residual(self, which: str, s: float, h: float = 1e-4) -> float:
        """Residual of the delay equation satisfied by ``which`` at ``s``.

        Returns ``|D_h(s^k X)(s) - k s^(k-1) Y(s-1)|`` with ``D_h`` the
        central difference of width ``h``, where ``(X, Y)`` is ``(F, f)`` or
        ``(f, F)`` of dimension ``k``.
        """
        c = self.constants
        table = {
            "F1": (1, self.F1, self.f1, 2.0, 5.0),
            "f1": (1, self.f1, self.F1, 2.0, 6.0),
            "F2": (2, self.F2, self.f2, c.alpha2, 7.0),
            "f2": (2, self.f2, self.F2, c.beta2, 6.0),
        }
        if which not in table:
            raise ValueError(f"unknown sifting function {which!r}")
        if not 1e-5 <= h <= 1e-3:
            raise ValueError("h must lie in [1e-5, 1e-3]")
        kappa, X, Y, start, stop = table[which]
        if s - h <= start or s + h > stop or (which == "F2" and s + h >= stop):
            raise DomainError(
                f"{which}: s = {s} +- {h} leaves the continuation range ({start}, {stop})")
        lhs = ((s + h) ** kappa * X(s + h) - (s - h) ** kappa * X(s - h)) / (2.0 * h)
        rhs = kappa * s ** (kappa - 1) * Y(s - 1.0)
        return abs(lhs - rhs)

    def junctions(self) -> dict[str, list[tuple[float, float, float]]]:
        """Both adjacent formulas at every junction, as ``(s, left, right)``."""
        c = self.constants
        one = np.array([1.0])

        def pair(left, right, s):
            x = s * one
            return (s, float(np.asarray(left(x))[0]), float(np.asarray(right(x))[0]))

        zero = lambda x: np.zeros_like(x)  # noqa: E731
        return {
            "f1": [pair(zero, self._f1_piece2, 2.0), pair(self._f1_piece2, self._f1_piece3, 4.0)],
            "F1": [pair(self._F1_piece1, self._F1_piece2, 3.0)],
            "f2": [pair(zero, self._f2_piece2, c.beta2)],
            "F2": [pair(self._F2_piece1, self._F2_piece2, 2.0),
                   pair(self._F2_piece2, self._F2_piece3, 4.0),
                   pair(self._F2_piece3, self._F2_piece4, c.alpha2)],
            "sigma2": [pair(lambda x: 1 / self._F2_piece1(x), lambda x: 1 / self._F2_piece2(x), 2.0),
                       pair(lambda x: 1 / self._F2_piece2(x), lambda x: 1 / self._F2_piece3(x), 4.0)],
        }

    def get(self, name: str) -> Callable:
        funcs = {"f1": self.f1, "F1": self.F1, "f2": self.f2, "F2": self.F2,
                 "sigma2": self.sigma2}
        try:
            return funcs[name]
        except KeyError:
            raise ValueError(f"unknown sifting function {name!r}") from None

    DOMAINS = {"f1": (0.0, 6.0), "F1": (0.0, 5.0), "f2": (0.0, 6.0),
               "F2": (0.0, 7.0), "sigma2": (0.0, 5.3577)}


@functools.lru_cache(maxsize=8)
def default_evaluator(rel_tol: float = DEFAULT_QUADRATURE.rel_tol) -> SieveFunctions:
    """Shared evaluator with the package defaults (built once per process)."""
    quad = QuadratureSpec(rel_tol=rel_tol, abs_tol=DEFAULT_QUADRATURE.abs_tol)
    return SieveFunctions(quad=quad)


def method_of_steps(kappa: int, upper_seed: Callable, lower_seed: Callable,
                    alpha: float, beta: float, stop: float, step: float = 1e-4):
    """March the coupled ``F``/``f`` delay system forward on a uniform grid.

    ``F`` equals ``upper_seed`` on ``(0, alpha]`` and ``f`` equals
    ``lower_seed`` on ``(0, beta]``; beyond that each is advanced with the
    trapezoid rule one unit block at a time, so every lagged value is
    already known.  ``alpha``, ``beta`` and 1 must be multiples of ``step``.

    Returns ``(grid, F, f)`` with ``grid[0] = 0`` (values there are NaN).
    """
    lag = round(1.0 / step)
    ia, ib = round(alpha / step), round(beta / step)
    if abs(ia * step - alpha) > 1e-9 or abs(ib * step - beta) > 1e-9:
        raise ValueError("alpha and beta must lie on the grid")
    n = round(stop / step)
    grid = step * np.arange(n + 1)
    upper = np.full(n + 1, np.nan)
    lower = np.full(n + 1, np.nan)
    upper[1:ia + 1] = upper_seed(grid[1:ia + 1])
    lower[1:ib + 1] = lower_seed(grid[1:ib + 1])
    for block in range(1, n + 1, lag):
        idx = np.arange(block, min(block + lag, n + 1))
        for own, other, first in ((upper, lower, ia + 1), (lower, upper, ib + 1)):
            todo = idx[idx >= first]
            if todo.size == 0:
                continue
            prev = np.concatenate([[todo[0] - 1], todo])
            rate = kappa * grid[prev] ** (kappa - 1) * other[prev - lag]
            scaled = (grid[prev[0]] ** kappa * own[prev[0]]
                      + np.cumsum(0.5 * step * (rate[1:] + rate[:-1])))
            own[todo] = scaled / grid[todo] ** kappa
    return grid, upper, lower


def march_sigma(kappa: int, stop: float, step: float = 1e-4):
    """``sigma_kappa`` on ``(0, stop]`` from its delay equation (lag 2)."""
    lag = round(2.0 / step)
    n = round(stop / step)
    grid = step * np.arange(n + 1)
    sigma = np.zeros(n + 1)
    init = (2.0 * _E_GAMMA) ** -kappa / math.gamma(kappa + 1)
    sigma[:lag + 1] = init * grid[:lag + 1] ** kappa
    for block in range(lag + 1, n + 1, lag):
        idx = np.arange(block, min(block + lag, n + 1))
        prev = np.concatenate([[idx[0] - 1], idx])
        rate = -kappa * grid[prev] ** (-kappa - 1) * sigma[prev - lag]
        scaled = (grid[prev[0]] ** -kappa * sigma[prev[0]]
                  + np.cumsum(0.5 * step * (rate[1:] + rate[:-1])))
        sigma[idx] = scaled * grid[idx] ** kappa
    return grid, sigma
