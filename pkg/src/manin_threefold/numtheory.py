"""Elementary arithmetic: primes, factorisation, multiplicative functions.

Everything here works on Python ints (arbitrary precision). The array
helpers (``totient_sieve`` and friends) return int64 numpy arrays and check
their range up front.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import check_int64

DEFAULT_SIEVE_LIMIT = 10**6


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit``, ascending."""

    limit: int
    primes: tuple[int, ...] = field(repr=False)

    @classmethod
    def build(cls, limit: int) -> "PrimeTable":
        if limit < 1:
            raise ValueError("sieve limit must be positive")
        flags = np.ones(limit + 1, dtype=bool)
        flags[:2] = False
        for p in range(2, math.isqrt(limit) + 1):
            if flags[p]:
                flags[p * p :: p] = False
        return cls(limit, tuple(int(p) for p in np.flatnonzero(flags)))

    def upto(self, bound: int) -> tuple[int, ...]:
        if bound > self.limit:
            raise ValueError(f"bound {bound} exceeds sieve limit {self.limit}")
        import bisect

        return self.primes[: bisect.bisect_right(self.primes, bound)]


@lru_cache(maxsize=4)
def prime_table(limit: int = DEFAULT_SIEVE_LIMIT) -> PrimeTable:
    return PrimeTable.build(limit)


def primes_upto(bound: int) -> tuple[int, ...]:
    limit = max(DEFAULT_SIEVE_LIMIT, bound)
    return prime_table(limit).upto(bound)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n <= DEFAULT_SIEVE_LIMIT:
        import bisect

        primes = prime_table().primes
        i = bisect.bisect_left(primes, n)
        return i < len(primes) and primes[i] == n
    pairs = factorize(n).pairs
    return len(pairs) == 1 and pairs[0][1] == 1


@dataclass(frozen=True)
class Factorization:
    n: int
    pairs: tuple[tuple[int, int], ...]

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    def value(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= p**e
        return out


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    """Trial division against the default sieve.

    Inputs beyond ``limit**2`` are refused: no big-integer factoring here.
    """
    if n < 1:
        raise ValueError(f"factorize expects a positive integer, got {n}")
    table = prime_table()
    if n > table.limit**2:
        raise ValueError(f"{n} is beyond the trial-division range")
    pairs = []
    m = n
    for p in table.primes:
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            pairs.append((p, e))
    if m > 1:
        pairs.append((m, 1))
    return Factorization(n, tuple(pairs))


def prime_factors(n: int) -> tuple[int, ...]:
    return factorize(abs(n)).primes() if n else ()


def valuation(p: int, n: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("euler_phi is defined on positive integers")
    out = n
    for p in factorize(n).primes():
        out -= out // p
    return out


def moebius(n: int) -> int:
    if n < 1:
        raise ValueError("moebius is defined on positive integers")
    sign = 1
    for _, e in factorize(n).pairs:
        if e > 1:
            return 0
        sign = -sign
    return sign


def moebius_tuple(values: Iterable[int]) -> int:
    """Product convention f(a) = f(a_1)...f(a_n) applied to the Moebius function."""
    out = 1
    for v in values:
        out *= moebius(v)
        if out == 0:
            return 0
    return out


def tau(n: int) -> int:
    """Number of positive divisors of |n|."""
    n = abs(n)
    if n == 0:
        raise ValueError("tau(0) is undefined")
    out = 1
    for _, e in factorize(n).pairs:
        out *= e + 1
    return out


def divisors(n: int) -> list[int]:
    n = abs(n)
    divs = [1]
    for p, e in factorize(n).pairs:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def squarefree_divisors(n: int) -> list[int]:
    divs = [1]
    for p in prime_factors(n):
        divs += [d * p for d in divs]
    return sorted(divs)


def gcd_tuple(values: Sequence[int]) -> int:
    if len(values) == 0:
        raise ValueError("gcd of an empty tuple")
    return reduce(math.gcd, (abs(v) for v in values))


def lcm_tuple(values: Sequence[int]) -> int:
    if len(values) == 0:
        raise ValueError("lcm of an empty tuple")
    return reduce(lambda a, b: a * b // math.gcd(a, b), (abs(v) for v in values))


# --- array sieves ---------------------------------------------------------


def totient_sieve(n: int) -> np.ndarray:
    """phi(k) for 0 <= k <= n (entry 0 is 0)."""
    check_int64(n, "totient sieve length")
    phi = np.arange(n + 1, dtype=np.int64)
    for p in primes_upto(n):
        phi[p::p] -= phi[p::p] // p
    return phi


def moebius_sieve(n: int) -> np.ndarray:
    """mu(k) for 0 <= k <= n (entry 0 is 0)."""
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    for p in primes_upto(n):
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu
