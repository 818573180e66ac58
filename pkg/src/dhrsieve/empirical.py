"""Exact desk-scale checks of the weighted sieve on ``{f(p) : x < p <= 2x}``.

Every element is factored completely, so sifted counts, the weighted sum
``W`` and the positive-weight implication ``Omega(n) <= r`` are evaluated
exactly rather than estimated.
"""
from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .exceptions import FactorizationFailure, InvalidParameters
from .localdensity import IntPolynomial, is_admissible
from .primes import factor_cofactor, is_prime, primes_between, primes_up_to

__all__ = [
    "AdmissibilityWarning",
    "SieveSequence",
    "WeightReport",
    "OmegaStatistics",
    "build_sequence",
    "factorizations",
    "sifted_count",
    "weighted_sum",
    "verify_Pr_deduction",
    "omega_statistics",
    "element_rows",
    "report_json",
    "rows_csv",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = 1
SMALL_PRIME_BOUND = 1 << 15
_NEAR_ZERO = 1e-12
# Reference r(k) for k = 2..10; other degrees fall back to Richert's 2k + 1.
_R_TABLE = {2: 4, 3: 6, 4: 7, 5: 9, 6: 10, 7: 11, 8: 12, 9: 13, 10: 15}


class AdmissibilityWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class SieveSequence:
    """The values ``f(p)`` for primes ``p`` in ``(x, 2x]``."""

    f: IntPolynomial
    x: int
    primes: np.ndarray
    values: tuple[int, ...]
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def X(self) -> int:
        return len(self.values)

    @property
    def N(self) -> int:
        return max(self.values) if self.values else 0

    @property
    def elements(self):
        return list(zip(self.primes.tolist(), self.values))


@dataclass(frozen=True)
class WeightReport:
    polynomial: str
    x: int
    N: int
    X: int
    r: int
    alpha: float
    beta: float
    z: float
    y: float
    eta: float
    W: float
    survivors: int
    positive_weight: int
    square_hit: int
    flagged: int
    max_omega_flagged: int | None
    pr_violations: int | None


@dataclass(frozen=True)
class OmegaStatistics:
    histogram: dict[int, int]
    r: int
    count_at_most_r: int
    density_ratio: float


def build_sequence(f: IntPolynomial, x: int) -> SieveSequence:
    """Enumerate ``f(p)`` for the primes in ``(x, 2x]``."""
    x = int(x)
    if not 100 <= x <= 10 ** 8:
        raise ValueError("x must lie in [1e2, 1e8]")
    if f(2 * x).bit_length() > 128:
        raise OverflowError(f"f(2x) = f({2 * x}) exceeds 128 bits")
    adm = is_admissible(f)
    if not adm:
        warnings.warn(f"{f} is not admissible: nu1({adm.witness}) = {adm.witness - 1}",
                      AdmissibilityWarning, stacklevel=2)
    primes = primes_between(x, 2 * x)
    values = tuple(f(int(p)) for p in primes)
    return SieveSequence(f=f, x=x, primes=primes, values=values)


@lru_cache(maxsize=16)
def _root_table(f: IntPolynomial, bound: int) -> tuple[tuple[int, tuple[int, ...]], ...]:
    table = []
    for q in primes_up_to(bound).tolist():
        roots = np.flatnonzero(f.eval_mod(np.arange(q, dtype=np.int64), q) == 0)
        if roots.size:
            table.append((q, tuple(roots.tolist())))
    return tuple(table)


def _split_cofactors(cofactors: list[int]) -> list[dict[int, int]]:
    return [factor_cofactor(m) for m in cofactors]


def factorizations(seq: SieveSequence, threads: int = 1) -> list[dict[int, int]]:
    """Complete factorization of every element (computed once, then cached).

    Primes below ``SMALL_PRIME_BOUND`` are removed by sieving the integers
    of ``(x, 2x]`` along the residue classes of the roots of ``f``; the
    cofactors are certified prime by Miller-Rabin or split by Pollard rho.
    """
    if "factors" in seq._cache:
        return seq._cache["factors"]
    lo = seq.x + 1
    index = np.full(seq.x, -1, dtype=np.int64)
    index[seq.primes - lo] = np.arange(seq.X)
    remaining = list(seq.values)
    factors: list[dict[int, int]] = [{} for _ in range(seq.X)]
    for q, roots in _root_table(seq.f, SMALL_PRIME_BOUND):
        for rho in roots:
            hits = index[(rho - lo) % q::q]
            for i in hits[hits >= 0].tolist():
                v, e = remaining[i], 0
                while v % q == 0:
                    v //= q
                    e += 1
                factors[i][q] = e
                remaining[i] = v
    square = SMALL_PRIME_BOUND * SMALL_PRIME_BOUND
    hard = []
    for i, m in enumerate(remaining):
        if m == 1:
            continue
        if m < square:
            factors[i][m] = 1
        else:
            hard.append(i)
    cofactors = [remaining[i] for i in hard]
    if threads > 1 and len(cofactors) > 64:
        chunk = math.ceil(len(cofactors) / threads)
        parts = [cofactors[j:j + chunk] for j in range(0, len(cofactors), chunk)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            split = [fac for part in pool.map(_split_cofactors, parts) for fac in part]
    else:
        split = _split_cofactors(cofactors)
    for i, fac in zip(hard, split):
        factors[i].update(fac)
    for i, fac in enumerate(factors):
        if math.prod(p ** e for p, e in fac.items()) != seq.values[i]:
            raise FactorizationFailure(f"factorization of {seq.values[i]} is incomplete")
        if any(p >= square and not is_prime(p) for p in fac):
            raise FactorizationFailure(f"composite factor left in {seq.values[i]}")
        factors[i] = dict(sorted(fac.items()))
    seq._cache["factors"] = factors
    return factors


def sifted_count(A: SieveSequence, z: float) -> int:
    """``S(A, z)``: elements with no prime factor below ``z``."""
    if z < 2:
        raise ValueError("z must be at least 2")
    return sum(1 for fac in factorizations(A) if not fac or min(fac) >= z)


def _thresholds(A: SieveSequence, r: int, alpha: float, beta: float):
    k = A.f.degree
    if not 0 < alpha < beta < 1.0 / k:
        raise InvalidParameters(f"need 0 < alpha < beta < 1/k = {1.0 / k:.6g}")
    eta = r + 1 - 1.0 / beta
    if eta <= 0:
        raise InvalidParameters(f"eta = r + 1 - 1/beta = {eta:.6g} must be positive")
    log_n = math.log(A.N)
    return eta, log_n, math.exp(alpha * log_n), math.exp(beta * log_n)


def _exact_weight_positive(medium: list[int], eta: float, beta: float, N: int) -> bool:
    with mpmath.workdps(60):
        log_y = mpmath.mpf(beta) * mpmath.log(N)
        total = mpmath.fsum(1 - mpmath.log(q) / log_y for q in medium)
        w = 1 - total / mpmath.mpf(eta)
        return w > mpmath.mpf(10) ** -50


def _scan(A: SieveSequence, r: int, alpha: float, beta: float):
    """Per-element survivor flag, weight, square hit and Omega."""
    eta, log_n, z, y = _thresholds(A, r, alpha, beta)
    log_y = beta * log_n
    rows = []
    for fac in factorizations(A):
        survivor = not fac or min(fac) >= z
        medium = [q for q in fac if z <= q < y]
        square = any(fac[q] > 1 for q in medium)
        weight = None
        positive = False
        if survivor:
            weight = 1.0 - sum(1.0 - math.log(q) / log_y for q in medium) / eta
            positive = weight > 0
            if abs(weight) <= _NEAR_ZERO:
                positive = _exact_weight_positive(medium, eta, beta, A.N)
        rows.append((survivor, weight, positive, square, sum(fac.values())))
    return eta, z, y, rows


def _report(A, r, alpha, beta, check: bool) -> WeightReport:
    eta, z, y, rows = _scan(A, r, alpha, beta)
    survivors = sum(1 for s, *_ in rows if s)
    W = math.fsum(w for s, w, *_ in rows if s)
    positive = sum(1 for s, _, pos, *_ in rows if s and pos)
    square_hit = sum(1 for *_, sq, _ in rows if sq)
    flagged = [om for s, _, pos, sq, om in rows if s and pos and not sq]
    violations = sum(1 for om in flagged if om > r) if check else None
    return WeightReport(
        polynomial=",".join(map(str, A.f.coefficients)), x=A.x, N=A.N, X=A.X,
        r=int(r), alpha=float(alpha), beta=float(beta), z=z, y=y, eta=eta, W=W,
        survivors=survivors, positive_weight=positive, square_hit=square_hit,
        flagged=len(flagged), max_omega_flagged=max(flagged) if flagged else None,
        pr_violations=violations)


def weighted_sum(A: SieveSequence, r: int, alpha: float, beta: float) -> WeightReport:
    """Richert's weighted sum with ``z = N^alpha``, ``y = N^beta``.

    ``W = sum over survivors of 1 - (1/eta) sum_{z<=p<y, p|n} (1 - log p/log y)``
    with ``eta = r + 1 - 1/beta``.  ``pr_violations`` is left as ``None``.
    """
    return _report(A, r, alpha, beta, check=False)


def verify_Pr_deduction(A: SieveSequence, r: int, alpha: float, beta: float) -> WeightReport:
    """Check that every positive-weight survivor is a ``P_r`` number.

    Survivors divisible by ``p^2`` for some ``z <= p < y`` are excluded
    from the check.  ``pr_violations`` counts flagged elements with
    ``Omega(n) > r``; the deduction guarantees it is zero.
    """
    return _report(A, r, alpha, beta, check=True)


def omega_statistics(A: SieveSequence, r: int | None = None) -> OmegaStatistics:
    """Histogram of ``Omega(f(p))`` with the count of ``P_r`` values."""
    if r is None:
        k = A.f.degree
        r = _R_TABLE.get(k, 2 * k + 1)
    hist: dict[int, int] = {}
    for fac in factorizations(A):
        om = sum(fac.values())
        hist[om] = hist.get(om, 0) + 1
    hist = dict(sorted(hist.items()))
    count = sum(c for om, c in hist.items() if om <= r)
    scale = A.x / math.log(A.x) ** 2
    return OmegaStatistics(histogram=hist, r=int(r), count_at_most_r=count,
                           density_ratio=count / scale)


def element_rows(A: SieveSequence, r: int, alpha: float, beta: float):
    """``(p, f(p), Omega, weight)`` per element; weight is None off the survivors."""
    _, _, _, rows = _scan(A, r, alpha, beta)
    return [(int(p), v, om, w) for p, v, (s, w, _, _, om) in zip(A.primes.tolist(), A.values, rows)]


def report_json(report: WeightReport, stats: OmegaStatistics | None = None,
                timestamp: bool = True, extra: dict | None = None) -> str:
    payload = {"schema": SCHEMA_VERSION}
    payload.update(asdict(report))
    payload["Pr_violations"] = payload.pop("pr_violations")
    payload["N"] = str(report.N)
    if stats is not None:
        payload["histogram"] = {str(k): v for k, v in stats.histogram.items()}
        payload["omega_r"] = stats.r
        payload["count_omega_at_most_r"] = stats.count_at_most_r
        payload["density_ratio"] = stats.density_ratio
    if extra:
        payload.update(extra)
    if timestamp:
        payload["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    return json.dumps(payload, indent=2)


def rows_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["p", "f_p", "omega", "weight"])
    for p, v, om, w in rows:
        writer.writerow([p, v, om, "" if w is None else repr(float(w))])
    return buf.getvalue()
