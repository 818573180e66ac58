"""Prime enumeration, primality testing and integer factorization.

Everything here works on Python integers, so 128-bit values are handled
without overflow.  Miller-Rabin with the first thirteen prime bases is
deterministic below 3.3e24; above that bound the test is probabilistic
with twenty bases.
"""
from __future__ import annotations

import math
from collections import Counter

import numba as nb
import numpy as np

from .exceptions import FactorizationFailure

__all__ = [
    "primes_up_to",
    "primes_between",
    "is_prime",
    "pollard_brent",
    "factorize",
    "big_omega",
]

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                 53, 59, 61, 67, 71)
_DETERMINISTIC_LIMIT = 3317044064679887385961981
_U = np.uint64
_WORD_LIMIT = 1 << 63
_SEGMENT = 1 << 20


def primes_up_to(n: int) -> np.ndarray:
    """All primes ``p <= n`` as an int64 array (sieve of Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if sieve[p]:
            sieve[p * p::2 * p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def primes_between(lo: int, hi: int) -> np.ndarray:
    """Primes ``p`` with ``lo < p <= hi`` via a segmented sieve."""
    lo = max(lo, 1)
    if hi <= lo:
        return np.zeros(0, dtype=np.int64)
    base = primes_up_to(math.isqrt(hi))
    chunks = []
    start = lo + 1
    while start <= hi:
        stop = min(start + _SEGMENT, hi + 1)
        seg = np.ones(stop - start, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= stop:
                break
            first = max(p * p, -(-start // p) * p)
            seg[first - start::p] = False
        if start <= 1:
            seg[:2 - start] = False
        chunks.append(np.flatnonzero(seg) + start)
        start = stop
    return np.concatenate(chunks).astype(np.int64)


def is_prime(n: int) -> bool:
    """Miller-Rabin primality test."""
    n = int(n)
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < _WORD_LIMIT:
        return bool(_miller_rabin_u64(_U(n), _MR_BASES))
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = _SMALL_PRIMES[:13] if n < _DETERMINISTIC_LIMIT else _SMALL_PRIMES
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_MASK = _U(0xFFFFFFFF)
_S32 = _U(32)


@nb.njit(cache=True)
def _mulhi(a, b):
    a_lo = a & _MASK
    a_hi = a >> _S32
    b_lo = b & _MASK
    b_hi = b >> _S32
    p0 = a_lo * b_lo
    p1 = a_lo * b_hi
    p2 = a_hi * b_lo
    mid = (p0 >> _S32) + (p1 & _MASK) + (p2 & _MASK)
    return a_hi * b_hi + (p1 >> _S32) + (p2 >> _S32) + (mid >> _S32)


@nb.njit(cache=True)
def _montmul(a, b, n, ninv):
    # Montgomery product a*b/2^64 mod n; needs odd n < 2^63.
    lo = a * b
    m = lo * ninv
    t = _mulhi(a, b) + _mulhi(m, n) + (_U(1) if lo != _U(0) else _U(0))
    if t >= n:
        t -= n
    return t


@nb.njit(cache=True)
def _gcd_u64(a, b):
    while b != _U(0):
        a, b = b, a % b
    return a


@nb.njit(cache=True)
def _brent_u64(n, c, max_iter):
    inv = n
    for _ in range(6):
        inv = inv * (_U(2) - n * inv)
    ninv = _U(0) - inv
    one = (_U(0) - n) % n
    y = (_U(2) * one) % n
    cc = (c * one) % n
    x = y
    ys = y
    q = one
    g = _U(1)
    r = 1
    steps = 0
    while g == _U(1):
        x = y
        for _ in range(r):
            y = _montmul(y, y, n, ninv) + cc
            if y >= n:
                y -= n
        k = 0
        while k < r and g == _U(1):
            ys = y
            for _ in range(min(128, r - k)):
                y = _montmul(y, y, n, ninv) + cc
                if y >= n:
                    y -= n
                q = _montmul(q, x - y if x > y else y - x, n, ninv)
            g = _gcd_u64(q, n)
            k += 128
        r *= 2
        steps += r
        if steps > max_iter:
            return _U(1)
    if g == n:
        g = _U(1)
        while g == _U(1):
            ys = _montmul(ys, ys, n, ninv) + cc
            if ys >= n:
                ys -= n
            g = _gcd_u64(x - ys if x > ys else ys - x, n)
    return g


@nb.njit(cache=True)
def _miller_rabin_u64(n, bases):
    inv = n
    for _ in range(6):
        inv = inv * (_U(2) - n * inv)
    ninv = _U(0) - inv
    one = (_U(0) - n) % n
    minus_one = n - one
    # r2 = 2^128 mod n, built by doubling to stay inside 64 bits.
    r2 = one
    for _ in range(64):
        r2 = r2 + r2 if r2 < n - r2 else r2 - (n - r2)
    d = n - _U(1)
    s = 0
    while d & _U(1) == _U(0):
        d >>= _U(1)
        s += 1
    for a in bases:
        base = _montmul(a % n, r2, n, ninv)
        x = one
        e = d
        while e != _U(0):
            if e & _U(1):
                x = _montmul(x, base, n, ninv)
            base = _montmul(base, base, n, ninv)
            e >>= _U(1)
        if x == one or x == minus_one:
            continue
        composite = True
        for _ in range(s - 1):
            x = _montmul(x, x, n, ninv)
            if x == minus_one:
                composite = False
                break
        if composite:
            return False
    return True


_MR_BASES = np.array(_SMALL_PRIMES[:13], dtype=np.uint64)


def pollard_brent(n: int, max_iter: int = 1 << 26) -> int:
    """Return a nontrivial factor of the odd composite ``n``.

    Brent's cycle finding with batched gcds.  The polynomial constant runs
    through 1, 2, 3, ... so the result is deterministic.  Odd ``n`` below
    ``2**63`` go through a compiled Montgomery-arithmetic kernel.
    """
    if n % 2 == 0:
        return 2
    if n < _WORD_LIMIT:
        for c in range(1, 64):
            g = int(_brent_u64(_U(n), _U(c), max_iter))
            if 1 < g < n:
                return g
        raise FactorizationFailure(f"Pollard rho found no factor of {n}")
    for c in range(1, 64):
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        steps = 0
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += 128
            r *= 2
            steps += r
            if steps > max_iter:
                break
        if g == n:
            # Batched gcd overshot; walk back one step at a time.
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    raise FactorizationFailure(f"Pollard rho found no factor of {n}")


def _factor_into(n: int, out: Counter) -> None:
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] += 1
            continue
        root = math.isqrt(m)
        if root * root == m:
            stack.extend((root, root))
            continue
        d = pollard_brent(m)
        stack.extend((d, m // d))


def factorize(n: int, trial_bound: int = 1000) -> dict[int, int]:
    """Prime factorization of ``n >= 1`` as ``{prime: exponent}``."""
    n = int(n)
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out: Counter = Counter()
    for p in _trial_primes(trial_bound):
        if p * p > n:
            break
        while n % p == 0:
            out[p] += 1
            n //= p
    if n > 1:
        _factor_into(n, out)
    return dict(sorted(out.items()))


def factor_cofactor(n: int) -> dict[int, int]:
    """Factor ``n`` known to have no small prime divisors (skips trial division)."""
    out: Counter = Counter()
    if n > 1:
        _factor_into(int(n), out)
    return dict(sorted(out.items()))


def big_omega(n: int) -> int:
    """Number of prime factors of ``n`` counted with multiplicity."""
    return sum(factorize(n).values())


_TRIAL_CACHE: dict[int, tuple[int, ...]] = {}


def _trial_primes(bound: int) -> tuple[int, ...]:
    if bound not in _TRIAL_CACHE:
        _TRIAL_CACHE[bound] = tuple(int(p) for p in primes_up_to(bound))
    return _TRIAL_CACHE[bound]
