"""Singular series, their Euler factors, and the global constant C.

Notation: for r = (r1, r2, r3),

    E_r = sum_q phi(q) (q; r1)(q; r2)(q; r3) / q^3,

factorising over primes; F_r is a second series built from Moebius and
divisor sums which coincides with E_r for coprime triples. The coincidence is
tested, never assumed: ``f_series`` evaluates F_r from its own definition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np
from scipy.special import zeta

from .errors import InvariantError
from .numtheory import (
    divisors,
    euler_phi,
    moebius,
    prime_factors,
    primes_upto,
    tau,
    totient_sieve,
    valuation,
)

ZETA2 = float(zeta(2.0))
ZETA3 = float(zeta(3.0))
E_ONE = ZETA2 / ZETA3


@dataclass(frozen=True)
class CoeffTriple:
    r1: int
    r2: int
    r3: int

    def __post_init__(self) -> None:
        if min(self.r1, self.r2, self.r3) < 1:
            raise InvariantError(f"coefficients must be positive, got {self.as_tuple()}")

    @classmethod
    def of(cls, r) -> "CoeffTriple":
        return r if isinstance(r, CoeffTriple) else cls(*(int(v) for v in r))

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.r1, self.r2, self.r3)

    def scaled(self, d: int) -> "CoeffTriple":
        return CoeffTriple(d * self.r1, d * self.r2, d * self.r3)

    def gcd(self) -> int:
        return math.gcd(math.gcd(self.r1, self.r2), self.r3)

    def prime_support(self) -> tuple[int, ...]:
        return prime_factors(self.r1 * self.r2 * self.r3)

    def p_part(self, p: int) -> "CoeffTriple":
        return CoeffTriple(*(p ** valuation(p, v) for v in self.as_tuple()))


@dataclass(frozen=True)
class SeriesApprox:
    value: float
    tail_bound: float
    cutoff: int

    def __post_init__(self) -> None:
        if self.tail_bound < 0:
            raise InvariantError("tail bound must be nonnegative")

    def contains(self, other: float, extra: float = 0.0) -> bool:
        return abs(self.value - other) <= self.tail_bound + extra


# --- singular series E_r ---------------------------------------------------------


def singular_series_truncated(r, Q: int) -> SeriesApprox:
    """Partial sum over q <= Q; the tail uses (q; r_i) <= r_i and phi(q) <= q."""
    r = CoeffTriple.of(r)
    if Q < 1:
        raise InvariantError("cutoff must be positive")
    q = np.arange(Q + 1, dtype=np.int64)
    phi = totient_sieve(Q)
    w = np.gcd(q, r.r1) * np.gcd(q, r.r2) * np.gcd(q, r.r3)
    qf = q[1:].astype(float)
    value = float(np.sum(phi[1:] * w[1:].astype(float) / qf**3))
    tail = r.r1 * r.r2 * r.r3 / Q
    return SeriesApprox(value, tail, Q)


def _sorted_exponents(r: CoeffTriple, p: int) -> tuple[int, int, int]:
    a, b, c = sorted((valuation(p, v) for v in r.as_tuple()), reverse=True)
    return a, b, c


def singular_series_euler(r, p: int) -> Fraction:
    """Closed form of the p-Euler factor of E_r, exact."""
    r = CoeffTriple.of(r)
    al, be, ga = _sorted_exponents(r, p)
    P = Fraction(p)
    num = P**al * (p + 1) * (1 + ga - be + p * (1 - ga + be)) - P ** (be + 1)
    return P ** (ga - al - 1) * num / (p + 1)


def singular_series_local_sum(r, p: int) -> Fraction:
    """The same Euler factor summed from its definition over q = p^k, exactly.

    Terms with k > max exponent form a geometric series that is closed off
    in rational arithmetic.
    """
    r = CoeffTriple.of(r)
    ex = [valuation(p, v) for v in r.as_tuple()]
    top = max(ex)
    total = Fraction(1)
    for k in range(1, top + 1):
        total += Fraction(p ** (k - 1) * (p - 1) * p ** sum(min(k, e) for e in ex), p ** (3 * k))
    total += (p - 1) * Fraction(p) ** (sum(ex) - 1) / Fraction(p) ** (2 * (top + 1)) / (1 - Fraction(1, p * p))
    return total


def singular_series_product(r, P: int) -> SeriesApprox:
    """Euler product over p <= P (and all primes of r1 r2 r3).

    Factors for p not dividing r equal 1 + 1/(p(p+1)); the omitted product
    lies in [1, exp(1/P)], so the true value is in [value, value*exp(1/P)].
    """
    r = CoeffTriple.of(r)
    support = set(r.prime_support())
    value = 1.0
    for p in primes_upto(P):
        value *= float(singular_series_euler(r, p)) if p in support else 1.0 + 1.0 / (p * (p + 1))
    for p in sorted(support):
        if p > P:
            value *= float(singular_series_euler(r, p))
    return SeriesApprox(value, value * math.expm1(1.0 / P), P)


@lru_cache(maxsize=1 << 16)
def singular_series_exact(r: tuple[int, int, int]) -> float:
    """E_r as zeta(2)/zeta(3) times the finitely many modified Euler factors."""
    cr = CoeffTriple.of(r)
    value = E_ONE
    for p in cr.prime_support():
        value *= float(singular_series_euler(cr, p) / singular_series_euler((1, 1, 1), p))
    return value


def phi_dirichlet_check(a: int, N: int) -> tuple[float, float, float]:
    """Sum_{n<=N} phi(a n)/n^3 against phi(a) zeta(2)/zeta(3) prod_{p|a}(1-p^-3)^-1.

    Returns (partial sum, closed form, tail bound a/N).
    """
    partial = sum(euler_phi(a * n) / n**3 for n in range(1, N + 1))
    closed = euler_phi(a) * E_ONE
    for p in prime_factors(a):
        closed /= 1.0 - p**-3.0
    return partial, closed, a / N


# --- F_r --------------------------------------------------------------------------


@lru_cache(maxsize=1 << 16)
def fgh_weight(m: int) -> Fraction:
    """Sum over f g h = m of mu(g)/g."""
    return sum((Fraction(moebius(g), g) * tau(m // g) for g in divisors(m)), Fraction(0))


def _f_prefactor(r: CoeffTriple):
    if r.gcd() != 1:
        raise InvariantError(f"F_r needs a coprime triple, got {r.as_tuple()}")
    g23 = math.gcd(r.r2, r.r3)
    return g23, r.r2 // g23, r.r3 // g23


def _f_term(r: CoeffTriple, g23: int, r2p: int, a: int, b: int, d: int) -> float:
    db = d * b
    dr1 = math.gcd(db, r.r1)
    d2 = math.gcd(d, r2p)
    m = db // dr1 * g23
    w = 1.0
    for p in prime_factors(r2p * a // d2):
        w *= 1.0 - 1.0 / (1 + p)
    return d2 * dr1 / d**2 * float(fgh_weight(m)) * w


def _abc_triples(n: int):
    for a in divisors(n):
        for b in divisors(n // a):
            yield a, b


def f_series_truncated(r, D: int) -> SeriesApprox:
    """F_r with the d-sum cut at D; everything else literal.

    Tail: each term is at most r1 r2' tau(m)/d^2 with tau(m) <= tau(d) tau(b (r2; r3)),
    and sum_{d>D} tau(d)/d^2 <= 2 (log D + 2)/D.
    """
    r = CoeffTriple.of(r)
    g23, r2p, r3p = _f_prefactor(r)
    total = 0.0
    tail = 0.0
    dtail = 2 * (math.log(D) + 2) / D
    for a, b in _abc_triples(r3p):
        mu_a = moebius(a)
        if not mu_a:
            continue
        inner = 0.0
        cop = r3p // b
        for d in range(1, D + 1):
            if math.gcd(d, cop) == 1:
                inner += _f_term(r, g23, r2p, a, b, d)
        total += mu_a / (a * b) * inner
        tail += r.r1 * r2p * tau(b * g23) / (a * b) * dtail
    return SeriesApprox(total / ZETA2, tail / ZETA2, D)


def _smooth_numbers(primes: tuple[int, ...], limit: int) -> list[int]:
    out = [1]
    for p in primes:
        nxt = []
        for v in out:
            while v <= limit:
                nxt.append(v)
                v *= p
        out = nxt
    return sorted(out)


def f_series(r, smooth_limit: int = 10**9) -> SeriesApprox:
    """F_r with the d-sum split as d = d1 d2.

    d1 is built from the primes S of r1 r2 r3 and d2 is coprime to S. All
    factors except the fgh weight depend on d1 only, and the fgh weight is
    multiplicative, so the d2-sum is the Dirichlet series
        sum_{(n; S)=1} lambda(n)/n^2 = zeta(2)^2/zeta(3) prod_{p in S} (1-p^-2)^2/(1-p^-3),
    lambda(n) = sum_{fgh=n} mu(g)/g. The d1-sum is taken literally up to
    ``smooth_limit`` with the tail bound of ``f_series_truncated``.
    """
    r = CoeffTriple.of(r)
    g23, r2p, r3p = _f_prefactor(r)
    S = r.prime_support()
    coprime_part = ZETA2**2 / ZETA3
    for p in S:
        coprime_part *= (1 - p**-2.0) ** 2 / (1 - p**-3.0)
    d1_values = _smooth_numbers(S, smooth_limit)
    dtail = 2 * (math.log(smooth_limit) + 2) / smooth_limit
    total = 0.0
    tail = 0.0
    for a, b in _abc_triples(r3p):
        mu_a = moebius(a)
        if not mu_a:
            continue
        cop = r3p // b
        inner = sum(_f_term(r, g23, r2p, a, b, d) for d in d1_values if math.gcd(d, cop) == 1)
        total += mu_a / (a * b) * inner
        tail += r.r1 * r2p * tau(b * g23) / (a * b) * dtail
    # |coprime_part| <= zeta(2)^2 bounds the propagated d1 tail
    return SeriesApprox(total * coprime_part / ZETA2, tail * ZETA2, smooth_limit)


def f_one_euler(p: int) -> Fraction:
    """p-factor of F_1 summed from its defining double series, closed off exactly.

    sum_delta p^(-2 delta) ((delta+1) - delta/p) with x = p^-2 sums to
    (1 - x/p)/(1 - x)^2; times (1 - x) this is (1 - p^-3)/(1 - p^-2).
    """
    x = Fraction(1, p * p)
    return (1 - x) * (1 - x / p) / (1 - x) ** 2


# --- Euler factor tables and the constant C ----------------------------------------


@dataclass
class LocalFactorTable:
    r: CoeffTriple
    entries: dict[int, tuple[Fraction, float]] = field(default_factory=dict)

    @classmethod
    def build(cls, r, P: int = 50) -> "LocalFactorTable":
        """E and F Euler factors for p <= P and all primes dividing r1 r2 r3."""
        r = CoeffTriple.of(r)
        primes = sorted(set(primes_upto(P)) | set(r.prime_support()))
        F1 = f_series((1, 1, 1)).value
        out = {}
        for p in primes:
            E = singular_series_euler(r, p)
            if r.r1 * r.r2 * r.r3 % p:
                F = float(f_one_euler(p))
            else:
                F = float(f_one_euler(p)) * f_series(r.p_part(p)).value / F1
            if E <= 0 or F <= 0:
                raise InvariantError(f"nonpositive Euler factor at p={p}")
            out[p] = (E, F)
        return cls(r, out)


def c_factor(p: int) -> Fraction:
    """(1 - 1/p)^5 (1 + 5/p + 5/p^2 + 1/p^3), exact."""
    P = Fraction(p)
    return (1 - 1 / P) ** 5 * (1 + 5 / P + 5 / P**2 + 1 / P**3)


@dataclass(frozen=True)
class ConstantC:
    approx: SeriesApprox
    factors: tuple[tuple[int, Fraction], ...]

    @property
    def value(self) -> float:
        return self.approx.value


def constant_C(P: int, keep_factors: bool = True) -> ConstantC:
    """Product of c_factor(p) over p <= P in ascending order.

    Every factor is below 1 and -log c_factor(p) <= 11/p^2 for p >= 5, with
    sum_{p>P} 1/p^2 <= 1/P, so the true C lies in [value exp(-11/P), value].
    """
    if P < 2:
        raise InvariantError("prime cutoff must be at least 2")
    primes = primes_upto(P)
    if P <= 10**4:
        facs = [(p, c_factor(p)) for p in primes]
        value = 1.0
        for _, f in facs:
            value *= float(f)
    else:
        pa = np.array(primes, dtype=float)
        x = 1.0 / pa
        logs = 5 * np.log1p(-x) + np.log1p(5 * x + 5 * x**2 + x**3)
        value = float(math.exp(math.fsum(logs.tolist())))
        facs = [(p, c_factor(p)) for p in primes[:25]] if keep_factors else []
    tail = value * -math.expm1(-11.0 / max(P, 5))
    return ConstantC(SeriesApprox(value, tail, P), tuple(facs) if keep_factors else ())


# --- the thirteen-fold Moebius sum ---------------------------------------------------


@dataclass(frozen=True)
class MoebiusConstantReport:
    T: int
    lhs: float
    C: float
    gap: float
    q_cutoff: int | None


def _lcm(*vals: int) -> int:
    out = 1
    for v in vals:
        out = out * v // math.gcd(out, v)
    return out


def moebius_constant_lhs(T: int, q_cutoff: int | None = None) -> float:
    """Truncated Moebius sum over |b|,|c|,|f|,|g|,h <= T of the singular-series weights.

    Each summand is mu(b,c,f,g,h) E_A / prod_k alpha_1k alpha_2k alpha_3k with
    A_k = alpha_1k alpha_2k. The sum is regrouped by distributivity: (b, h)
    only meet rows 1-2 and c only row 3, once f and g are fixed. E_A is the
    exact Euler form unless ``q_cutoff`` asks for the truncated q-sum.
    """
    if T < 1:
        raise InvariantError("T must be positive")
    vals = [v for v in range(1, T + 1) if moebius(v)]
    mu = {v: moebius(v) for v in vals}
    comp = ((1, 2), (0, 2), (0, 1))

    @lru_cache(maxsize=None)
    def E(A: tuple[int, int, int]) -> float:
        if q_cutoff is None:
            return singular_series_exact(A)
        return singular_series_truncated(A, q_cutoff).value

    triples = list(product(vals, repeat=3))
    mu3 = {t: mu[t[0]] * mu[t[1]] * mu[t[2]] for t in triples}
    total = 0.0
    for f in triples:
        for g in triples:
            s_c = 0.0
            for c in triples:
                a3 = [_lcm(c[i], c[j], f[k], g[k]) for k, (i, j) in enumerate(comp)]
                s_c += mu3[c] / (a3[0] * a3[1] * a3[2])
            if s_c == 0.0:
                continue
            s_bh = 0.0
            for h in vals:
                a1 = [_lcm(g[i], g[j], h) for i, j in comp]
                for b in triples:
                    a2 = [_lcm(b[i], b[j], f[k]) for k, (i, j) in enumerate(comp)]
                    A = (a1[0] * a2[0], a1[1] * a2[1], a1[2] * a2[2])
                    s_bh += mu[h] * mu3[b] * E(A) / (A[0] * A[1] * A[2])
            total += mu3[f] * mu3[g] * s_c * s_bh
    return total


def moebius_constant_check(T: int, q_cutoff: int | None = None, prime_cutoff: int = 10**6) -> MoebiusConstantReport:
    if T > 6:
        raise InvariantError("T is capped at 6 (thirteen nested sums)")
    if q_cutoff is not None and q_cutoff > 10**3:
        raise InvariantError("q cutoff is capped at 1000")
    lhs = moebius_constant_lhs(T, q_cutoff)
    C = constant_C(prime_cutoff, keep_factors=False).value
    return MoebiusConstantReport(T, lhs, C, abs(lhs - C), q_cutoff)
