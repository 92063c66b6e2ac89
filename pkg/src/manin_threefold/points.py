"""Rational points on the open part of x1*y2*y3 + x2*y1*y3 + x3*y1*y2 = 0.

Two independent counters are provided:

* ``enumerate_direct`` loops over primitive ``x`` and solves the equation
  for ``y3``;
* ``enumerate_torsor`` walks the torsor ``a1*d1 + a2*d2 + a3*d3 = 0`` with
  its thirteen coprimality conditions and maps tuples down.

They share nothing but the height function, which is what makes agreement
between them meaningful.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import CostCapExceeded, InvariantError, check_int64
from .numtheory import gcd_tuple, lcm_tuple, moebius, squarefree_divisors

Triple = tuple[int, int, int]

DEFAULT_KEEP_POINTS = 1000
DIRECT_CAP = 10**5
TORSOR_CAP = 10**6


def _residual(x: Sequence[int], y: Sequence[int]) -> int:
    return x[0] * y[1] * y[2] + x[1] * y[0] * y[2] + x[2] * y[0] * y[1]


def _canonical_triple(v: Sequence[int]) -> Triple:
    for c in v:
        if c:
            return tuple(v) if c > 0 else tuple(-c2 for c2 in v)  # type: ignore[return-value]
    return tuple(v)  # type: ignore[return-value]


@dataclass(frozen=True, order=True)
class RationalPoint:
    """A point of the open subset, stored by its canonical representatives."""

    x: Triple
    y: Triple

    def __post_init__(self) -> None:
        if len(self.x) != 3 or len(self.y) != 3:
            raise InvariantError("coordinates must be triples")
        if 0 in self.x or 0 in self.y:
            raise InvariantError(f"point {self.x},{self.y} has a zero coordinate")
        if gcd_tuple(self.x) != 1 or gcd_tuple(self.y) != 1:
            raise InvariantError(f"representatives {self.x},{self.y} are not primitive")
        if _residual(self.x, self.y) != 0:
            raise InvariantError(f"{self.x},{self.y} does not satisfy the equation")
        if self.x[0] < 0 or self.y[0] < 0:
            raise InvariantError("representatives are not in canonical sign")

    @classmethod
    def from_representative(cls, x: Sequence[int], y: Sequence[int]) -> "RationalPoint":
        return cls(_canonical_triple(x), _canonical_triple(y))

    @property
    def height(self) -> int:
        return height(self)

    def sort_key(self) -> tuple:
        return (self.height, self.x, self.y)


def height(p: RationalPoint) -> int:
    """Anticanonical height max_{i,j} x_i^2 |y_j|."""
    return max(c * c for c in p.x) * max(abs(c) for c in p.y)


@dataclass(frozen=True)
class TorsorPoint:
    a: Triple
    d: Triple
    z: Triple

    def __post_init__(self) -> None:
        if 0 in self.a or 0 in self.z:
            raise InvariantError("torsor coordinates a, z must be nonzero")
        if min(self.d) < 1:
            raise InvariantError("torsor coordinates d must be positive")
        if sum(ai * di for ai, di in zip(self.a, self.d)) != 0:
            raise InvariantError("a1*d1 + a2*d2 + a3*d3 != 0")
        c22, c24 = coprimality_equivalence(self.a, self.d, self.z)
        if c22 != c24:
            raise AssertionError(f"coprimality systems disagree at {self}")
        if not c22:
            raise InvariantError(f"{self} violates the coprimality conditions")

    @property
    def height(self) -> int:
        return torsor_height(self.a, self.d, self.z)


def torsor_height(a: Sequence[int], d: Sequence[int], z: Sequence[int]) -> int:
    ys = (d[1] * d[2] * z[0], d[0] * d[2] * z[1], d[0] * d[1] * z[2])
    return max((ai * zi) ** 2 for ai, zi in zip(a, z)) * max(abs(v) for v in ys)


def torsor_map(t: TorsorPoint) -> RationalPoint:
    a, d, z = t.a, t.d, t.z
    x = (a[0] * z[0], a[1] * z[1], a[2] * z[2])
    y = (d[1] * d[2] * z[0], d[0] * d[2] * z[1], d[0] * d[1] * z[2])
    return RationalPoint.from_representative(x, y)


# --- coprimality systems ---------------------------------------------------

_PAIRS = ((0, 1), (0, 2), (1, 2))
_COMPLEMENT = {0: (1, 2), 1: (0, 2), 2: (0, 1)}


def coprime_system_22(a: Sequence[int], d: Sequence[int], z: Sequence[int]) -> bool:
    g = math.gcd
    if gcd_tuple([a[0] * z[0], a[1] * z[1], a[2] * z[2]]) != 1:
        return False
    for i, j in _PAIRS:
        if g(d[i], d[j]) != 1 or g(z[i], z[j]) != 1:
            return False
    return all(g(d[k], z[k]) == 1 for k in range(3))


def coprime_system_24(a: Sequence[int], d: Sequence[int], z: Sequence[int]) -> bool:
    g = math.gcd
    for i, j in _PAIRS:
        if g(d[i], d[j]) != 1 or g(z[i], z[j]) != 1:
            return False
    if any(g(d[k], z[k]) != 1 for k in range(3)):
        return False
    if gcd_tuple(a) != 1:
        return False
    for k in range(3):
        i, j = _COMPLEMENT[k]
        if gcd_tuple([a[i], a[j], z[k]]) != 1:
            return False
    return True


def coprimality_equivalence(a: Sequence[int], d: Sequence[int], z: Sequence[int]) -> tuple[bool, bool]:
    """Evaluate both forms of the thirteen coprimality conditions."""
    if 0 in a or 0 in d or 0 in z:
        raise InvariantError("coprimality conditions need nonzero entries")
    return coprime_system_22(a, d, z), coprime_system_24(a, d, z)


# --- Moebius inversion -------------------------------------------------------


@dataclass(frozen=True)
class MoebiusIndex:
    b: Triple
    c: Triple
    f: Triple
    g: Triple
    h: int

    @property
    def alpha(self) -> tuple[Triple, Triple, Triple]:
        return moebius_alpha(self.b, self.c, self.f, self.g, self.h)

    def weight(self) -> int:
        return _mu_prod(self.b, self.c, self.f, self.g, (self.h,))

    def divides(self, a: Sequence[int], d: Sequence[int], z: Sequence[int]) -> bool:
        al1, al2, al3 = self.alpha
        return all(a[k] % al1[k] == 0 and d[k] % al2[k] == 0 and z[k] % al3[k] == 0 for k in range(3))


def _mu_prod(*groups: Iterable[int]) -> int:
    out = 1
    for grp in groups:
        for v in grp:
            out *= moebius(v)
            if not out:
                return 0
    return out


def moebius_alpha(b, c, f, g, h) -> tuple[Triple, Triple, Triple]:
    """The 3x3 lcm tuple attached to a Moebius index (b, c, f, g, h)."""
    al1, al2, al3 = [], [], []
    for k in range(3):
        i, j = _COMPLEMENT[k]
        al1.append(lcm_tuple([g[i], g[j], h]))
        al2.append(lcm_tuple([b[i], b[j], f[k]]))
        al3.append(lcm_tuple([c[i], c[j], f[k], g[k]]))
    return tuple(al1), tuple(al2), tuple(al3)  # type: ignore[return-value]


@dataclass(frozen=True)
class MoebiusCheck:
    lhs: Fraction
    rhs: Fraction

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def _sharp_weight(a: Sequence[int], d: Sequence[int], z: Sequence[int]) -> int:
    """Sum of mu(b,c,f,g,h) over all indices whose lcm tuple divides (a, d, z).

    Indices only range over squarefree values (mu vanishes elsewhere), and any
    index that can divide the tuple is a divisor of one of its entries, which
    makes the candidate lists finite. The sum is regrouped by which lcm rows
    each variable touches: h only meets row 1, b only row 2, c only row 3.
    """
    cand_g = [squarefree_divisors(a[_COMPLEMENT[k][0]]) for k in range(3)]
    cand_f = [squarefree_divisors(d[k]) for k in range(3)]
    cand_b = [squarefree_divisors(d[_COMPLEMENT[k][0]]) for k in range(3)]
    cand_c = [squarefree_divisors(z[_COMPLEMENT[k][0]]) for k in range(3)]
    cand_h = squarefree_divisors(a[0])

    total = 0
    for g in product(*cand_g):
        mu_g = _mu_prod(g)
        for f in product(*cand_f):
            mu_f = _mu_prod(f)
            s_h = 0
            for h in cand_h:
                if all(a[k] % lcm_tuple([g[_COMPLEMENT[k][0]], g[_COMPLEMENT[k][1]], h]) == 0 for k in range(3)):
                    s_h += moebius(h)
            if not s_h:
                continue
            s_b = 0
            for b in product(*cand_b):
                if all(d[k] % lcm_tuple([b[_COMPLEMENT[k][0]], b[_COMPLEMENT[k][1]], f[k]]) == 0 for k in range(3)):
                    s_b += _mu_prod(b)
            if not s_b:
                continue
            s_c = 0
            for c in product(*cand_c):
                if all(
                    z[k] % lcm_tuple([c[_COMPLEMENT[k][0]], c[_COMPLEMENT[k][1]], f[k], g[k]]) == 0 for k in range(3)
                ):
                    s_c += _mu_prod(c)
            total += mu_g * mu_f * s_h * s_b * s_c
    return total


def moebius_inversion_check(G: Mapping[tuple[int, ...], Fraction | int]) -> MoebiusCheck:
    """Compare the coprimality-restricted sum of G with its Moebius expansion.

    ``G`` maps 9-tuples (a1, a2, a3, d1, d2, d3, z1, z2, z3) of nonzero
    integers to rationals; tuples not listed are zero.
    """
    lhs = Fraction(0)
    rhs = Fraction(0)
    for key, value in G.items():
        if len(key) != 9 or 0 in key:
            raise InvariantError(f"support tuple {key} must have 9 nonzero entries")
        a, d, z = key[0:3], key[3:6], key[6:9]
        value = Fraction(value)
        if coprime_system_22(a, d, z):
            lhs += value
        rhs += value * _sharp_weight(a, d, z)
    return MoebiusCheck(lhs, rhs)


def random_finite_G(rng: np.random.Generator, size: int = 12, max_entry: int = 6) -> dict[tuple[int, ...], Fraction]:
    """A random finitely supported G on 9-tuples with entries in [-max_entry, max_entry] minus 0.

    About half of the support is drawn from tuples satisfying the coprimality
    conditions, so both sides of the inversion identity are usually nonzero.
    """
    G: dict[tuple[int, ...], Fraction] = {}
    want_coprime = size // 2
    while len(G) < size:
        mags = rng.integers(1, max_entry + 1, size=9)
        signs = rng.choice((-1, 1), size=9)
        key = tuple(int(v) for v in mags * signs)
        key = key[:3] + tuple(abs(v) for v in key[3:6]) + key[6:]
        coprime = coprime_system_22(key[0:3], key[3:6], key[6:9])
        if want_coprime > 0 and not coprime:
            continue
        if coprime:
            want_coprime -= 1
        G[key] = Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 10)))
    return G


# --- enumeration -------------------------------------------------------------


@dataclass
class EnumerationResult:
    bound: int
    count: int
    method: str
    points: list[RationalPoint] | None = None
    raw_count: int | None = None

    def __post_init__(self) -> None:
        if self.points is not None:
            if len(self.points) != self.count:
                raise InvariantError("retained point list does not match count")

    def heights(self) -> list[int]:
        if self.points is None:
            raise ValueError("points were not retained")
        return [p.height for p in self.points]

    def counts_upto(self, bounds: Iterable[int]) -> dict[int, int]:
        """N(B') for every B' <= bound, read off the retained point list."""
        hs = np.sort(np.array(self.heights(), dtype=np.int64))
        return {int(b): int(np.searchsorted(hs, b, side="right")) for b in bounds}


def _direct_rows(B: int, x1_values: Sequence[int]) -> list[tuple[Triple, Triple]]:
    xm = math.isqrt(B)
    out: list[tuple[Triple, Triple]] = []
    for x1 in x1_values:
        for x2 in range(-xm, xm + 1):
            if not x2:
                continue
            for x3 in range(-xm, xm + 1):
                if not x3 or gcd_tuple([x1, x2, x3]) != 1:
                    continue
                mx = max(x1, abs(x2), abs(x3))
                ym = B // (mx * mx)
                if ym < 1:
                    continue
                y2 = np.concatenate([np.arange(-ym, 0), np.arange(1, ym + 1)]).astype(np.int64)
                rows = max(1, 4_000_000 // len(y2))
                for start in range(1, ym + 1, rows):
                    y1 = np.arange(start, min(ym, start + rows - 1) + 1, dtype=np.int64)[:, None]
                    den = x1 * y2[None, :] + x2 * y1
                    num = -x3 * y1 * y2[None, :]
                    ok = den != 0
                    safe = np.where(ok, den, 1)
                    ok &= num % safe == 0
                    y3 = num // safe
                    ok &= np.abs(y3) <= ym
                    Y1 = np.broadcast_to(y1, ok.shape)
                    Y2 = np.broadcast_to(y2[None, :], ok.shape)
                    ok &= np.gcd(np.gcd(Y1, Y2), y3) == 1
                    for a, b, c in zip(Y1[ok].tolist(), Y2[ok].tolist(), y3[ok].tolist()):
                        out.append(((x1, x2, x3), (a, b, c)))
    return out


def _partition(values: Sequence[int], parts: int) -> list[list[int]]:
    return [list(values[i::parts]) for i in range(parts)]


def enumerate_direct(B: int, keep_points: int | bool = DEFAULT_KEEP_POINTS, workers: int = 1) -> EnumerationResult:
    """Exact N(B) by looping over primitive x and solving for y3."""
    if B < 1:
        raise InvariantError("height bound must be positive")
    if B > DIRECT_CAP:
        raise CostCapExceeded(f"direct enumeration capped at B <= {DIRECT_CAP}")
    check_int64(math.isqrt(B) * B * B, "intermediate product")
    x1_values = list(range(1, math.isqrt(B) + 1))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = pool.map(_direct_rows, [B] * workers, _partition(x1_values, workers))
            pairs = [p for chunk in chunks for p in chunk]
    else:
        pairs = _direct_rows(B, x1_values)
    keep = keep_points if isinstance(keep_points, bool) else B <= keep_points
    points = sorted((RationalPoint(x, y) for x, y in pairs), key=RationalPoint.sort_key) if keep else None
    return EnumerationResult(B, len(pairs), "direct", points)


def _torsor_block(B: int, d1_values: Sequence[int]) -> tuple[int, list[tuple[Triple, Triple, Triple]]]:
    """Count admissible torsor tuples with d1 in the given set.

    Returns the raw count over all sign choices and the tuples with a1, z1 > 0,
    which are exactly the ones mapping to canonical representatives.
    """
    raw = 0
    canonical: list[tuple[Triple, Triple, Triple]] = []
    g = math.gcd
    for d1 in d1_values:
        for d2 in range(1, B // d1 + 1):
            if g(d1, d2) != 1:
                continue
            for d3 in range(1, min(B // d1, B // d2) + 1):
                if g(d1, d3) != 1 or g(d2, d3) != 1:
                    continue
                # |z_i|^3 * d_j * d_k <= height <= B
                zb = [int(round((B / q) ** (1 / 3))) + 1 for q in (d2 * d3, d1 * d3, d1 * d2)]
                ranges = [[v for v in range(-zb[i], zb[i] + 1) if v] for i in range(3)]
                for z1 in ranges[0]:
                    if g(z1, d1) != 1 or z1 * z1 * abs(z1) * d2 * d3 > B:
                        continue
                    for z2 in ranges[1]:
                        if g(z2, d2) != 1 or g(z1, z2) != 1:
                            continue
                        for z3 in ranges[2]:
                            if g(z3, d3) != 1 or g(z1, z3) != 1 or g(z2, z3) != 1:
                                continue
                            M = max(abs(d2 * d3 * z1), abs(d1 * d3 * z2), abs(d1 * d2 * z3))
                            if max(z1 * z1, z2 * z2, z3 * z3) * M > B:
                                continue
                            L = math.isqrt(B // M)
                            n1, n2 = L // abs(z1), L // abs(z2)
                            if n1 < 1 or n2 < 1:
                                continue
                            a1 = np.concatenate([np.arange(-n1, 0), np.arange(1, n1 + 1)])[:, None]
                            a2 = np.concatenate([np.arange(-n2, 0), np.arange(1, n2 + 1)])[None, :]
                            s = a1 * d1 + a2 * d2
                            ok = (s % d3 == 0) & (s != 0)
                            a3 = -s // d3
                            ok &= np.abs(a3 * z3) <= L
                            A1 = np.broadcast_to(a1, ok.shape)
                            A2 = np.broadcast_to(a2, ok.shape)
                            ok &= np.gcd(np.gcd(A1 * z1, A2 * z2), a3 * z3) == 1
                            raw += int(ok.sum())
                            if z1 > 0:
                                sel = ok & (A1 > 0)
                                for u, v, w in zip(A1[sel].tolist(), A2[sel].tolist(), a3[sel].tolist()):
                                    canonical.append(((u, v, w), (d1, d2, d3), (z1, z2, z3)))
    return raw, canonical


def enumerate_torsor(
    B: int, keep_points: int | bool = DEFAULT_KEEP_POINTS, workers: int = 1
) -> EnumerationResult:
    """Exact N(B) through the torsor parametrization.

    ``raw_count`` counts every admissible (a, d, z) with all sign choices; the
    map to points is 4-to-1, so ``count == raw_count / 4``.
    """
    if B < 1:
        raise InvariantError("height bound must be positive")
    if B > TORSOR_CAP:
        raise CostCapExceeded(f"torsor enumeration capped at B <= {TORSOR_CAP}")
    d1_values = list(range(1, B + 1))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            blocks = list(pool.map(_torsor_block, [B] * workers, _partition(d1_values, workers)))
    else:
        blocks = [_torsor_block(B, d1_values)]
    raw = sum(b[0] for b in blocks)
    tuples = [t for b in blocks for t in b[1]]
    if raw != 4 * len(tuples):
        raise InvariantError(f"torsor fibres are not of size 4: raw={raw}, canonical={len(tuples)}")
    keep = keep_points if isinstance(keep_points, bool) else B <= keep_points
    points = None
    if keep:
        points = sorted((torsor_map(TorsorPoint(*t)) for t in tuples), key=RationalPoint.sort_key)
    return EnumerationResult(B, len(tuples), "torsor", points, raw_count=raw)


def torsor_preimages(p: RationalPoint) -> list[TorsorPoint]:
    """All torsor tuples mapping onto ``p``, found by exhaustive divisor search."""
    from .numtheory import divisors

    out = []
    reps = [(p.x, p.y), (p.x, tuple(-v for v in p.y)), (tuple(-v for v in p.x), p.y),
            (tuple(-v for v in p.x), tuple(-v for v in p.y))]
    for x, y in reps:
        choices = [[s * q for q in divisors(x[i]) for s in (1, -1)] for i in range(3)]
        for z in product(*choices):
            if any(y[i] % z[i] for i in range(3)):
                continue
            P = [y[i] // z[i] for i in range(3)]
            if min(P) < 1:
                continue
            # d2*d3 = P1, d1*d3 = P2, d1*d2 = P3
            sq = P[1] * P[2]
            if sq % P[0]:
                continue
            d1 = math.isqrt(sq // P[0])
            if d1 * d1 * P[0] != sq or P[2] % d1 or P[1] % d1:
                continue
            d = (d1, P[2] // d1, P[1] // d1)
            if d[1] * d[2] != P[0]:
                continue
            a = tuple(x[i] // z[i] for i in range(3))
            try:
                out.append(TorsorPoint(a, d, tuple(z)))  # type: ignore[arg-type]
            except InvariantError:
                continue
    return out


# --- symmetry and I/O ----------------------------------------------------------


def octahedral_image(p: RationalPoint, perm: Sequence[int], signs: Sequence[int]) -> RationalPoint:
    """Apply a signed permutation to the pairs (x_i, y_i)."""
    x = [signs[i] * p.x[perm[i]] for i in range(3)]
    y = [signs[i] * p.y[perm[i]] for i in range(3)]
    return RationalPoint.from_representative(x, y)


def signed_permutations() -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    for perm in permutations(range(3)):
        for signs in product((1, -1), repeat=3):
            yield perm, signs


def points_to_csv(points: Iterable[RationalPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x1", "x2", "x3", "y1", "y2", "y3", "height"])
    for p in sorted(points, key=RationalPoint.sort_key):
        w.writerow([*p.x, *p.y, p.height])
    return buf.getvalue()
