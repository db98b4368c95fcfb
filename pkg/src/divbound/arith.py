"""Exact integer arithmetic and multiplicative-function primitives.

Factorization, segmented smallest-prime-factor sieves, tau / omega / phi,
divisor enumeration, exact integer roots and deterministic primality.
Everything here is pure and exact; no floats anywhere near a comparison.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from math import isqrt

import numpy as np

__all__ = [
    "Factorization",
    "SieveSegment",
    "DEFAULT_SEGMENT_SIZE",
    "factorize",
    "tau",
    "omega",
    "euler_phi",
    "divisors_from_factorization",
    "divisors_up_to_fourth_root",
    "spf_sieve_segment",
    "next_prime_in",
    "next_prime_after",
    "is_prime",
    "sieve_primes",
    "integer_kth_root",
]

DEFAULT_SEGMENT_SIZE = 1 << 22

# Deterministic Miller-Rabin witness tiers, exhaustive below 2^64.
_MR_TIERS = (
    (2047, (2,)),
    (1373653, (2, 3)),
    (9080191, (31, 73)),
    (25326001, (2, 3, 5)),
    (3215031751, (2, 3, 5, 7)),
    (4759123141, (2, 7, 61)),
    (1122004669633, (2, 13, 23, 1662803)),
    (2152302898747, (2, 3, 5, 7, 11)),
    (3474749660383, (2, 3, 5, 7, 11, 13)),
    (341550071728321, (2, 3, 5, 7, 11, 13, 17)),
    (3825123056546413051, (2, 3, 5, 7, 11, 13, 17, 19, 23)),
    (1 << 64, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)),
)

_SMALL_PRIME_LIMIT = 1 << 20
_small_primes: list[int] | None = None
_small_primes_lock = threading.Lock()


def sieve_primes(limit: int) -> list[int]:
    """All primes <= limit, ascending."""
    if limit < 2:
        return []
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return [int(p) for p in np.nonzero(mask)[0]]


def _primes_cache() -> list[int]:
    global _small_primes
    if _small_primes is None:
        with _small_primes_lock:
            if _small_primes is None:
                _small_primes = sieve_primes(_SMALL_PRIME_LIMIT)
    return _small_primes


def is_prime(n: int) -> bool:
    """Deterministic primality test for 0 <= n < 2^64."""
    if n >= 1 << 64:
        raise ValueError(f"primality test is only deterministic below 2^64, got {n}")
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for bound, bases in _MR_TIERS:
        if n < bound:
            witnesses = bases
            break
    for a in witnesses:
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


def next_prime_in(lo_exclusive: int, hi_exclusive: int) -> int | None:
    """Smallest prime p with lo_exclusive < p < hi_exclusive, or None."""
    if lo_exclusive < 1:
        raise ValueError("lower bound must be a positive integer")
    c = lo_exclusive + 1
    if c <= 2:
        if 2 < hi_exclusive:
            return 2
        c = 3
    if c % 2 == 0:
        if is_prime(c) and c < hi_exclusive:
            return c
        c += 1
    while c < hi_exclusive:
        if is_prime(c):
            return c
        c += 2
    return None


def next_prime_after(x: int) -> int:
    """Smallest prime strictly greater than x."""
    c = max(x + 1, 2)
    if c == 2:
        return 2
    if c % 2 == 0:
        c += 1
    while not is_prime(c):
        c += 2
    return c


@dataclass(frozen=True)
class Factorization:
    """Canonical prime-power decomposition: n = prod p^a, primes ascending."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"factored value must be positive, got {self.n}")
        object.__setattr__(self, "factors", tuple(tuple(f) for f in self.factors))
        prod = 1
        prev = 0
        for p, a in self.factors:
            if p <= prev:
                raise ValueError("primes must be strictly increasing")
            if a < 1:
                raise ValueError(f"exponent of {p} must be >= 1, got {a}")
            prev = p
            prod *= p**a
        if prod != self.n:
            raise ValueError(f"factor product {prod} does not equal n = {self.n}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(a for _, a in self.factors)


def _factor_int(n: int) -> list[tuple[int, int]]:
    factors: list[tuple[int, int]] = []
    m = n
    last = 1
    for p in _primes_cache():
        if p * p > m:
            break
        last = p
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
            if m == 1:
                return factors
            if m < 1 << 64 and is_prime(m):
                factors.append((m, 1))
                return factors
    else:
        # cached primes exhausted: continue by odd trial division
        c = last + 2
        while c * c <= m:
            if m % c == 0:
                e = 0
                while m % c == 0:
                    m //= c
                    e += 1
                factors.append((c, e))
                if m == 1:
                    return factors
                if m < 1 << 64 and is_prime(m):
                    factors.append((m, 1))
                    return factors
            c += 2
    if m > 1:
        factors.append((m, 1))
    return factors


def factorize(n: int, segment: "SieveSegment | None" = None) -> Factorization:
    """Canonical Factorization of n >= 1.

    Uses the segment's smallest-prime-factor table when n falls inside it,
    otherwise trial division by sieved primes (deterministic either way).
    """
    if n < 1:
        raise ValueError(f"cannot factorize {n}; argument must be >= 1")
    if n == 1:
        return Factorization(1, ())
    if segment is not None and segment.lo <= n <= segment.hi:
        return Factorization(n, tuple(segment.factor(n)))
    return Factorization(n, tuple(_factor_int(n)))


def tau(f: Factorization) -> int:
    """Number of divisors: prod (a_i + 1)."""
    t = 1
    for _, a in f.factors:
        t *= a + 1
    return t


def omega(f: Factorization) -> int:
    """Number of distinct prime factors."""
    return len(f.factors)


def euler_phi(f: Factorization) -> int:
    """Euler totient: prod p^(a-1) * (p-1)."""
    phi = 1
    for p, a in f.factors:
        phi *= p ** (a - 1) * (p - 1)
    return phi


def divisors_from_factorization(f: Factorization) -> list[int]:
    """All divisors of n, ascending."""
    divs = [1]
    for p, a in f.factors:
        pk = 1
        block = []
        for _ in range(a):
            pk *= p
            block.extend(d * pk for d in divs)
        divs.extend(block)
    return sorted(divs)


def integer_kth_root(n: int, k: int) -> int:
    """floor(n^(1/k)) in exact integer arithmetic."""
    if n < 0:
        raise ValueError("root of a negative value")
    if k < 1:
        raise ValueError("root index must be >= 1")
    if n in (0, 1) or k == 1:
        return n
    if k == 2:
        return isqrt(n)
    if k == 4:
        return isqrt(isqrt(n))
    # Newton iteration with a bit-length start, then exact correction
    x = 1 << (-(-n.bit_length() // k))
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def divisors_up_to_fourth_root(n: int) -> list[int]:
    """All d with d | n and d^4 <= n, ascending.

    The membership test is d^4 <= n on integers; n = 16 includes d = 2,
    n = 15 does not.
    """
    if n < 1:
        raise ValueError(f"argument must be >= 1, got {n}")
    r = isqrt(isqrt(n))
    return [d for d in range(1, r + 1) if n % d == 0]


_prime_array_cache: dict[int, np.ndarray] = {}
_prime_array_lock = threading.Lock()


def _prime_array(limit: int) -> np.ndarray:
    """Cached ndarray of primes <= limit (grow-only, keyed by limit)."""
    with _prime_array_lock:
        for cap, arr in _prime_array_cache.items():
            if cap >= limit:
                return arr[arr <= limit]
        mask = np.ones(limit + 1, dtype=bool)
        mask[:2] = False
        for p in range(2, isqrt(limit) + 1):
            if mask[p]:
                mask[p * p :: p] = False
        arr = np.nonzero(mask)[0].astype(np.int64)
        _prime_array_cache.clear()
        _prime_array_cache[limit] = arr
        return arr


@dataclass(frozen=True)
class SieveSegment:
    """Smallest-prime-factor table for the inclusive range [lo, hi].

    spf[i] is the least prime factor of lo + i; the entry for 1 is the
    sentinel 1 ("unit").
    """

    lo: int
    hi: int
    spf: np.ndarray = field(repr=False)

    def spf_of(self, n: int) -> int:
        if not self.lo <= n <= self.hi:
            raise ValueError(f"{n} outside segment [{self.lo}, {self.hi}]")
        return int(self.spf[n - self.lo])

    def factor(self, n: int) -> list[tuple[int, int]]:
        """Prime-power factorization of n using the table for the first step.

        Cofactors that fall outside the segment are finished by trial
        division; with lo = 1 the whole chase stays inside the table.
        """
        if not self.lo <= n <= self.hi:
            raise ValueError(f"{n} outside segment [{self.lo}, {self.hi}]")
        factors: list[tuple[int, int]] = []
        m = n
        while m > 1:
            if self.lo <= m <= self.hi:
                p = int(self.spf[m - self.lo])
            else:
                p = _factor_int(m)[0][0]
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
        factors.sort()
        return factors

    def factorization(self, n: int) -> Factorization:
        return Factorization(n, tuple(self.factor(n)))


def spf_sieve_segment(
    lo: int, hi: int, max_size: int = DEFAULT_SEGMENT_SIZE
) -> SieveSegment:
    """Build the smallest-prime-factor table for [lo, hi].

    Rejects inverted ranges and ranges longer than max_size entries.
    """
    if lo < 1 or hi < lo:
        raise ValueError(f"invalid range [{lo}, {hi}]")
    length = hi - lo + 1
    if length > max_size:
        raise ValueError(f"segment of {length} entries exceeds limit {max_size}")
    root = isqrt(hi)
    if root > 1 << 26:
        raise ValueError("segment sieve supports hi <= 2^52")
    spf = np.zeros(length, dtype=np.int64)
    for p in _prime_array(root) if root >= 2 else ():
        p = int(p)
        start = max(((lo + p - 1) // p) * p, p * p)
        if start > hi:
            continue
        idx = np.arange(start - lo, length, p)
        unmarked = idx[spf[idx] == 0]
        spf[unmarked] = p
    rest = np.nonzero(spf == 0)[0]
    spf[rest] = rest + lo  # primes in range are their own least factor
    if lo == 1:
        spf[0] = 1  # unit sentinel
    return SieveSegment(lo, hi, spf)
