"""Local root counts of an integer polynomial and the constants built from them.

For a prime ``p``

* ``nu1(p)`` counts units ``a`` mod ``p`` with ``f(a) = 0 (mod p)``,
* ``nu2(p)`` counts all residues ``a`` mod ``p`` with ``a f(a) = 0 (mod p)``,

and both extend to squarefree moduli multiplicatively.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .exceptions import NotPrime, NotSquarefree, PolynomialError
from .primes import factorize, is_prime, primes_up_to
from .sievefn import EULER_GAMMA

__all__ = [
    "IntPolynomial",
    "LocalDensity",
    "Admissibility",
    "SingularSeries",
    "MertensReport",
    "nu1",
    "nu2",
    "local_density",
    "nu_squarefree",
    "root_counts",
    "is_admissible",
    "singular_series",
    "mertens_report",
]

# Residues are enumerated directly below this modulus; above it the count
# comes from deg gcd(f, x^p - x) over F_p.
_BRUTE_FORCE_LIMIT = 5000


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial with coefficients in ascending degree order.

    >>> IntPolynomial.parse("1,1,1")(2)
    7
    """

    coefficients: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) < 2:
            raise PolynomialError("polynomial must have degree at least 1")
        if coeffs[-1] <= 0:
            raise PolynomialError("leading coefficient must be positive")
        if coeffs[0] == 0:
            raise PolynomialError("constant term must be nonzero")

    @classmethod
    def parse(cls, text: str) -> "IntPolynomial":
        """Parse ``"c0,c1,...,ck"`` (ascending coefficients)."""
        try:
            coeffs = [int(part) for part in text.replace(" ", "").split(",")]
        except ValueError:
            raise PolynomialError(f"cannot parse polynomial {text!r}") from None
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> int:
        return self.coefficients[-1]

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def eval_mod(self, a: np.ndarray, m: int) -> np.ndarray:
        """``f(a) mod m`` for an int64 array ``a`` of residues, ``m < 3e9``."""
        a = np.asarray(a, dtype=np.int64) % m
        acc = np.zeros_like(a)
        for c in reversed(self.coefficients):
            acc = (acc * a + c % m) % m
        return acc

    def content(self) -> int:
        return math.gcd(*self.coefficients)

    def rational_roots(self) -> list:
        """Rational roots, found by the divisor search over ``c0`` and ``a_k``."""
        from fractions import Fraction

        def divisors(n):
            n = abs(n)
            small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
            return sorted(set(small + [n // d for d in small]))

        roots = set()
        for num in divisors(self.coefficients[0]):
            for den in divisors(self.leading):
                for cand in (Fraction(num, den), Fraction(-num, den)):
                    value = sum(c * cand ** i for i, c in enumerate(self.coefficients))
                    if value == 0:
                        roots.add(cand)
        return sorted(roots)

    def __str__(self) -> str:
        terms = []
        for i, c in reversed(list(enumerate(self.coefficients))):
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            coef = str(c) if (abs(c) != 1 or i == 0) else ("-" if c < 0 else "")
            terms.append(f"{coef}{mono}")
        return " + ".join(terms).replace("+ -", "- ")


@dataclass(frozen=True)
class LocalDensity:
    p: int
    nu1: int
    nu2: int


@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    witness: int | None = None

    def __bool__(self) -> bool:
        return self.admissible


@dataclass(frozen=True)
class SingularSeries:
    value: float
    p_limit: int
    tail_bound: float


@dataclass(frozen=True)
class MertensReport:
    x: int
    nu1_sum_residual: float
    nu2_sum_residual: float
    nu1_product_ratio: float
    nu2_product_ratio: float


# -- polynomial arithmetic over F_p (coefficient lists, ascending degree)

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymulmod(a, b, mod_poly, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _polyrem(out, mod_poly, p)


def _polyrem(a, m, p):
    a = _trim(list(a))
    dm = len(m) - 1
    inv = pow(m[-1], -1, p)
    while len(a) - 1 >= dm and a:
        factor = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - factor * c) % p
        _trim(a)
    return a


def _distinct_root_count(coeffs: Sequence[int], p: int) -> int:
    """Number of residues mod p that are roots, via deg gcd(f, x^p - x)."""
    f = _trim([c % p for c in coeffs])
    if not f:
        return p
    if len(f) == 1:
        return 0
    # x^p mod f by square-and-multiply.
    result, base = [1], _polyrem([0, 1], f, p)
    e = p
    while e:
        if e & 1:
            result = _polymulmod(result, base, f, p)
        base = _polymulmod(base, base, f, p)
        e >>= 1
    g = list(result) + [0] * 2
    g[1] = (g[1] - 1) % p
    g = _trim(g)
    a, b = f, g
    while b:
        a, b = b, _polyrem(a, b, p)
    return len(a) - 1


def _quadratic_root_count(c0: int, c1: int, c2: int, p: int) -> int:
    c0, c1, c2 = c0 % p, c1 % p, c2 % p
    if c2 == 0:
        if c1:
            return 1
        return p if c0 == 0 else 0
    disc = (c1 * c1 - 4 * c0 * c2) % p
    if disc == 0:
        return 1
    return 2 if pow(disc, (p - 1) // 2, p) == 1 else 0


def _all_root_count(f: IntPolynomial, p: int) -> int:
    """#{a mod p : f(a) = 0 mod p} for a prime p (roots among all residues)."""
    if p <= _BRUTE_FORCE_LIMIT:
        return int(np.count_nonzero(f.eval_mod(np.arange(p), p) == 0))
    if f.degree == 1:
        c0, c1 = f.coefficients
        if c1 % p:
            return 1
        return p if c0 % p == 0 else 0
    if f.degree == 2:
        return _quadratic_root_count(*f.coefficients, p)
    return _distinct_root_count(f.coefficients, p)


def _nu1_unchecked(f: IntPolynomial, p: int) -> int:
    roots = _all_root_count(f, p)
    return roots - (1 if f.coefficients[0] % p == 0 else 0)


def _require_prime(p: int) -> int:
    p = int(p)
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    return p


def nu1(f: IntPolynomial, p: int) -> int:
    """Units ``a`` mod ``p`` with ``f(a) = 0 (mod p)``."""
    return _nu1_unchecked(f, _require_prime(p))


def nu2(f: IntPolynomial, p: int) -> int:
    """Residues ``a`` mod ``p`` with ``a f(a) = 0 (mod p)``.

    Zero always qualifies and a nonzero residue qualifies exactly when it is
    a root of ``f``, so this equals ``nu1(f, p) + 1``.
    """
    return _nu1_unchecked(f, _require_prime(p)) + 1


def local_density(f: IntPolynomial, p: int) -> LocalDensity:
    n1 = nu1(f, p)
    return LocalDensity(p=int(p), nu1=n1, nu2=n1 + 1)


def nu_squarefree(f: IntPolynomial, which: str, d: int) -> int:
    """``nu1(d)`` or ``nu2(d)`` for squarefree ``d``, by multiplicativity."""
    if which not in ("nu1", "nu2"):
        raise ValueError("which must be 'nu1' or 'nu2'")
    d = int(d)
    if d < 1:
        raise ValueError("d must be a positive integer")
    parts = factorize(d)
    if any(e > 1 for e in parts.values()):
        raise NotSquarefree(f"{d} is not squarefree")
    count = 1
    for p in parts:
        n = _nu1_unchecked(f, p)
        count *= n if which == "nu1" else n + 1
    return count


def root_counts(f: IntPolynomial, primes: Iterable[int]) -> np.ndarray:
    """``nu1(p)`` for many primes at once (primality is not rechecked)."""
    primes = np.asarray(list(primes) if not isinstance(primes, np.ndarray) else primes,
                        dtype=np.int64)
    return _cached_root_counts(f, primes.tobytes())


@lru_cache(maxsize=32)
def _cached_root_counts(f: IntPolynomial, key: bytes) -> np.ndarray:
    primes = np.frombuffer(key, dtype=np.int64)
    out = np.fromiter((_nu1_unchecked(f, int(p)) for p in primes), dtype=np.int64,
                      count=primes.size)
    out.setflags(write=False)
    return out


def is_admissible(f: IntPolynomial) -> Admissibility:
    """Check ``nu1(p) < p - 1`` for every prime ``p``.

    Only primes ``p <= k + 2`` and primes dividing the content of ``f`` can
    fail: otherwise ``f`` is nonzero mod ``p`` and ``nu1(p) <= k < p - 1``.
    """
    candidates = {int(p) for p in primes_up_to(f.degree + 2)}
    candidates.update(factorize(f.content()))
    for p in sorted(candidates):
        if _nu1_unchecked(f, p) >= p - 1:
            return Admissibility(False, p)
    return Admissibility(True, None)


def singular_series(f: IntPolynomial, p_limit: int) -> SingularSeries:
    """Truncated singular series ``2 prod_{2<p<=P} (1 - nu1/(p-1)) / (1 - 1/p)``.

    ``tail_bound`` is the heuristic size of the neglected log-factor,
    ``sum (k+1)/p`` over primes in ``(P, 2P]``.
    """
    if p_limit < 3:
        raise ValueError("p_limit must be at least 3")
    primes = primes_up_to(2 * p_limit)
    inside = primes[(primes > 2) & (primes <= p_limit)]
    n1 = root_counts(f, inside).astype(float)
    pf = inside.astype(float)
    log_value = math.log(2.0) + float(np.sum(np.log1p(-n1 / (pf - 1.0)) - np.log1p(-1.0 / pf)))
    window = primes[primes > p_limit].astype(float)
    tail = float(np.sum((f.degree + 1) / window))
    return SingularSeries(value=math.exp(log_value), p_limit=int(p_limit), tail_bound=tail)


def mertens_report(f: IntPolynomial, x: int) -> MertensReport:
    """Raw residuals of the four Mertens-type estimates at ``x``.

    The singular series in the two ratios is truncated at ``x`` itself.
    """
    if x < 100:
        raise ValueError("x must be at least 100")
    primes = primes_up_to(int(x))
    pf = primes.astype(float)
    n1 = root_counts(f, primes).astype(float)
    n2 = n1 + 1.0
    logp, logx = np.log(pf), math.log(x)
    sum1 = float(np.sum(n1 * logp / (pf - 1.0))) - logx
    sum2 = float(np.sum(n2 * logp / pf)) - 2.0 * logx
    with np.errstate(divide="ignore"):
        # An inadmissible f makes a factor vanish; the ratio is then 0.
        log_v1 = float(np.sum(np.log1p(-n1 / (pf - 1.0))))
        log_v2 = float(np.sum(np.log1p(-n2 / pf)))
    odd = primes > 2
    log_series = math.log(2.0) + float(
        np.sum(np.log1p(-n1[odd] / (pf[odd] - 1.0)) - np.log1p(-1.0 / pf[odd])))
    ratio1 = math.exp(log_v1 + math.log(logx) + EULER_GAMMA - log_series)
    ratio2 = math.exp(log_v2 + 2.0 * math.log(logx) + 2.0 * EULER_GAMMA - log_series)
    return MertensReport(x=int(x), nu1_sum_residual=sum1, nu2_sum_residual=sum2,
                         nu1_product_ratio=ratio1, nu2_product_ratio=ratio2)
