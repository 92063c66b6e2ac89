"""Kloosterman sums and the twisted sums S_{r,h}(h1, h2; x).

The twisted sum counts pairs (xi, eta) in [1, x]^2 with r*xi*eta = -h mod x,
weighted by e((h1*xi + h2*eta)/x). Its closed form is a divisor sum of
Kloosterman sums; both sides are implemented here without sharing code.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import InvariantError
from .numtheory import divisors, euler_phi, tau

TWO_PI = 2.0 * math.pi


def e(theta: float) -> complex:
    """exp(2 pi i theta), with theta reduced mod 1 first."""
    return cmath.exp(1j * TWO_PI * (theta % 1.0))


def _e_frac(num: int, den: int) -> complex:
    # exact reduction of num/den mod 1 before going to floating point
    return cmath.exp(1j * TWO_PI * ((num % den) / den))


@dataclass(frozen=True)
class TwistedSumParams:
    r: int
    h: int
    h1: int
    h2: int
    x: int

    def __post_init__(self) -> None:
        if self.r < 1 or self.x < 1:
            raise InvariantError("r and x must be positive")


def kloosterman(a: int, b: int, q: int) -> complex:
    """S(a, b; q) by direct summation over units mod q."""
    if q < 1:
        raise InvariantError("modulus must be positive")
    if q == 1:
        return 1.0 + 0j
    s = 0j
    for t in range(1, q + 1):
        if math.gcd(t, q) == 1:
            s += _e_frac(a * t + b * pow(t, -1, q), q)
    return s


def twisted_sum_direct(p: TwistedSumParams) -> complex:
    """The defining double sum, looped term by term."""
    r, h, h1, h2, x = p.r, p.h, p.h1, p.h2, p.x
    s = 0j
    for xi in range(1, x + 1):
        for eta in range(1, x + 1):
            if (r * xi * eta + h) % x == 0:
                s += _e_frac(h1 * xi + h2 * eta, x)
    return s


def twisted_sum_closed(p: TwistedSumParams) -> complex:
    """Divisor sum of Kloosterman sums.

    With g = (r; x) and r' = r/g the value is zero unless g | (h; h1; h2),
    and otherwise
        sum over d with d*g | (x; h; h2) of d * g^2 * S(h1/g, b_d; x/(d g)),
        b_d = -(h2/(d g)) * inv(r' mod x/(d g)) * (h/(d g)).
    Valid for h = 0 as well; the congruence then reads r*xi*eta = 0 mod x.
    """
    r, h, h1, h2, x = p.r, p.h, p.h1, p.h2, p.x
    g = math.gcd(r, x)
    if h % g or h1 % g or h2 % g:
        return 0j
    rp = r // g
    G = math.gcd(math.gcd(x, h), h2)
    total = 0j
    for d in divisors(G // g) if G % g == 0 else ():
        dg = d * g
        q = x // dg
        inv = pow(rp, -1, q) if q > 1 else 0
        total += d * g * g * kloosterman(h1 // g, -(h2 // dg) * inv * (h // dg), q)
    return total


def ramanujan_zero_zero(r: int, h: int, x: int) -> int:
    """S_{r,h}(0, 0; x) as the divisor sum of totients."""
    g = math.gcd(r, x)
    if h % g:
        return 0
    G = math.gcd(x, h)
    return sum(d * g * g * euler_phi(x // (d * g)) for d in divisors(G // g))


# --- batched evaluation -----------------------------------------------------


@lru_cache(maxsize=256)
def kloosterman_table(q: int) -> np.ndarray:
    """Matrix K[a, b] = S(a, b; q) for 0 <= a, b < q."""
    if q == 1:
        return np.ones((1, 1), dtype=complex)
    units = np.array([t for t in range(1, q) if math.gcd(t, q) == 1], dtype=np.int64)
    invs = np.array([pow(int(t), -1, q) for t in units], dtype=np.int64)
    a = np.arange(q, dtype=np.int64)[:, None]
    E1 = np.exp(1j * TWO_PI * ((a * units[None, :]) % q) / q)
    E2 = np.exp(1j * TWO_PI * ((a * invs[None, :]) % q) / q)
    return E1 @ E2.T


def twisted_sum_table(r: int, h: int, x: int) -> np.ndarray:
    """All S_{r,h}(h1, h2; x) for h1, h2 mod x at once.

    Uses the 2-D DFT of the indicator of the congruence r*xi*eta = -h mod x;
    entry [h1 mod x, h2 mod x] is the sum.
    """
    xi = np.arange(x, dtype=np.int64)
    M = ((r * np.outer(xi, xi) + h) % x == 0).astype(float)
    return np.fft.ifft2(M) * (x * x)


def twisted_sum_closed_grid(r: int, h: int, x: int, h1: np.ndarray, h2: np.ndarray) -> np.ndarray:
    """Closed form evaluated on broadcast arrays of (h1, h2)."""
    h1, h2 = np.broadcast_arrays(np.asarray(h1, dtype=np.int64), np.asarray(h2, dtype=np.int64))
    out = np.zeros(h1.shape, dtype=complex)
    g = math.gcd(r, x)
    if h % g:
        return out
    ok = (h1 % g == 0) & (h2 % g == 0)
    rp = r // g
    for d in divisors(math.gcd(x, h) // g) if math.gcd(x, h) % g == 0 else ():
        dg = d * g
        sel = ok & (h2 % dg == 0)
        if not sel.any():
            continue
        q = x // dg
        inv = pow(rp, -1, q) if q > 1 else 0
        K = kloosterman_table(q)
        a = (h1[sel] // g) % q
        b = (-(h2[sel] // dg) * inv * (h // dg)) % q
        out[sel] += d * g * g * K[a, b]
    return out


# --- sweep and bound audit ------------------------------------------------------


@dataclass
class SweepReport:
    r_max: int
    x_max: int
    h_max: int
    cases: int
    max_abs_diff: float
    mismatches: list[tuple[int, int, int, int, int]] = field(default_factory=list)


def identity_sweep(r_max: int = 30, x_max: int = 30, h_max: int = 10, tol: float = 1e-8) -> SweepReport:
    """Compare closed and direct forms over 1 <= r, x <= max, 1 <= |h|,|h1|,|h2| <= h_max."""
    hs = np.array([v for v in range(-h_max, h_max + 1) if v], dtype=np.int64)
    H1, H2 = np.meshgrid(hs, hs, indexing="ij")
    cases = 0
    worst = 0.0
    bad: list[tuple[int, int, int, int, int]] = []
    for x in range(1, x_max + 1):
        for r in range(1, r_max + 1):
            for h in hs.tolist():
                direct = twisted_sum_table(r, h, x)[H1 % x, H2 % x]
                closed = twisted_sum_closed_grid(r, h, x, H1, H2)
                diff = np.abs(direct - closed)
                cases += diff.size
                worst = max(worst, float(diff.max()))
                for i, j in zip(*np.nonzero(diff > tol)):
                    bad.append((r, h, int(H1[i, j]), int(H2[i, j]), x))
    return SweepReport(r_max, x_max, h_max, cases, worst, bad)


@dataclass
class BoundAuditReport:
    grid: dict
    max_ratio_01: float
    max_ratio_10: float
    max_ratio_11: float
    max_ratio_weil: float
    # the 01/10 ratios against tau(h) * (r; x) * (x; h h'), which differs from
    # the plain bound only when (r; x) > 1
    max_ratio_gcd_scaled: float = 0.0
    mismatches: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def bound_01(r: int, h: int, h2: int, x: int) -> float:
    return tau(h) * math.gcd(x, h * h2)


def bound_11(r: int, h: int, h1: int, h2: int, x: int) -> float:
    g = math.gcd(r, x)
    inner = math.gcd(math.gcd(h * h1 // g, h * h2 // g), x) if (h * h1) % g == 0 and (h * h2) % g == 0 else 1
    return tau(x) ** 2 * g * math.sqrt(x) * math.sqrt(inner)


def weil_bound(a: int, b: int, q: int) -> float:
    return math.sqrt(math.gcd(math.gcd(a, b), q)) * tau(q) * math.sqrt(q)


def bound_audit(r_max: int = 20, x_max: int = 20, h_max: int = 8, slack: float = 1e-9) -> BoundAuditReport:
    """Check the three twisted-sum bounds and the Weil bound on a grid.

    h ranges over nonzero values; h1, h2 range over [-h_max, h_max]. Each bound
    is checked only where it applies (the 01 bound needs h1 = 0 and h2 != 0, the
    10 bound h2 = 0 and h1 != 0, the 11 bound h1*h2 != 0).
    A ratio above 1 + slack is recorded as a mismatch.
    """
    hs = [v for v in range(-h_max, h_max + 1) if v]
    full = list(range(-h_max, h_max + 1))
    r01 = r10 = r11 = rw = rs = 0.0
    bad: list = []
    for x in range(1, x_max + 1):
        for r in range(1, r_max + 1):
            for h in hs:
                T = twisted_sum_table(r, h, x)
                for h1 in full:
                    for h2 in full:
                        s = float(abs(T[h1 % x, h2 % x]))
                        if h1 == 0 and h2 != 0:
                            ratio = s / bound_01(r, h, h2, x)
                            r01 = max(r01, ratio)
                            rs = max(rs, ratio / math.gcd(r, x))
                            tag = "01"
                        elif h2 == 0 and h1 != 0:
                            ratio = s / bound_01(r, h, h1, x)
                            r10 = max(r10, ratio)
                            rs = max(rs, ratio / math.gcd(r, x))
                            tag = "10"
                        elif h1 and h2:
                            ratio = s / bound_11(r, h, h1, h2, x)
                            r11 = max(r11, ratio)
                            tag = "11"
                        else:
                            zz = ramanujan_zero_zero(r, h, x)
                            ratio = 0.0 if abs(s - zz) < 1e-8 else float("inf")
                            tag = "00"
                        if ratio > 1 + slack:
                            bad.append(
                                {"bound": tag, "r": r, "h": h, "h1": h1, "h2": h2, "x": x, "ratio": float(ratio)}
                            )
    for q in range(1, x_max + 1):
        K = kloosterman_table(q)
        for a in full:
            for b in full:
                ratio = float(abs(K[a % q, b % q])) / weil_bound(a, b, q)
                rw = max(rw, ratio)
                if ratio > 1 + slack:
                    bad.append({"bound": "weil", "a": a, "b": b, "q": q, "ratio": float(ratio)})
    grid = {"r_max": r_max, "x_max": x_max, "h_max": h_max}
    return BoundAuditReport(grid, r01, r10, r11, rw, rs, bad)


def kloosterman_crt(a: int, b: int, q1: int, q2: int) -> complex:
    """S(a, b; q1 q2) through the twisted multiplicativity for coprime q1, q2."""
    if math.gcd(q1, q2) != 1:
        raise InvariantError("moduli must be coprime")
    i1 = pow(q1, -1, q2) if q2 > 1 else 0
    i2 = pow(q2, -1, q1) if q1 > 1 else 0
    return kloosterman(a * i2, b * i2, q1) * kloosterman(a * i1, b * i1, q2)


def values_are_real(values: Iterable[complex], rel: float = 1e-9) -> bool:
    return all(abs(v.imag) <= rel * (1 + abs(v.real)) for v in values)
