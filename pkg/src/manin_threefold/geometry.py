"""Geometric constants: the alpha invariant, local densities, mu_infinity, and
their assembly into the leading constant.

The alpha invariant is an exact polytope volume. Vertices come from solving
every square subsystem of active constraints in rational arithmetic, and the
volume from a pulling triangulation out of a fixed base vertex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy import integrate

from .errors import InvariantError
from .localdata import SeriesApprox, c_factor, constant_C
from .numtheory import is_prime, primes_upto

Vector = tuple[Fraction, ...]

MU_INF_CLOSED = 96 * math.log(2) - 12 + 4 * math.pi**2
ALPHA_MU_CLOSED = (math.pi**2 - 3 + 24 * math.log(2)) / 144
POINT_COUNT_LIMIT = 97


# --- exact linear algebra ------------------------------------------------------------


def solve_exact(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Vector | None:
    """Solve A x = b for square A by Gaussian elimination; None if singular."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    for col in range(n):
        piv = next((i for i in range(col, n) if M[i][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for i in range(n):
            if i != col and M[i][col] != 0:
                f = M[i][col] / M[col][col]
                M[i] = [a - f * c for a, c in zip(M[i], M[col])]
    return tuple(M[i][n] / M[i][i] for i in range(n))


def det_exact(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    M = [[Fraction(v) for v in row] for row in rows]
    n = len(M)
    sign = 1
    out = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if M[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            sign = -sign
        out *= M[col][col]
        for i in range(col + 1, n):
            f = M[i][col] / M[col][col]
            if f:
                M[i] = [a - f * c for a, c in zip(M[i], M[col])]
    return sign * out


def affine_rank(points: Sequence[Vector]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    rows = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    rank = 0
    ncols = len(base)
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [a - f * c for a, c in zip(rows[i], rows[rank])]
        rank += 1
    return rank


# --- polytopes ------------------------------------------------------------------------


@dataclass(frozen=True)
class HalfSpaceSystem:
    """Inequalities a.w + c >= 0, optionally sliced by one hyperplane e.w = f."""

    dimension: int
    inequalities: tuple[tuple[tuple[Fraction, ...], Fraction], ...]
    hyperplane: tuple[tuple[Fraction, ...], Fraction] | None = None

    def eliminate(self, index: int) -> tuple["HalfSpaceSystem", Fraction]:
        """Solve the hyperplane for coordinate ``index`` and substitute.

        Returns the reduced system and |coefficient| of the eliminated variable,
        the factor by which the slice measure is normalised.
        """
        if self.hyperplane is None:
            raise InvariantError("no hyperplane to eliminate with")
        e, f = self.hyperplane
        ei = Fraction(e[index])
        if ei == 0:
            raise InvariantError("cannot eliminate a variable absent from the hyperplane")
        # w_index = (f - sum_{j != index} e_j w_j) / e_index
        out = []
        for a, c in self.inequalities:
            ai = Fraction(a[index])
            new_a = tuple(Fraction(a[j]) - ai * Fraction(e[j]) / ei for j in range(self.dimension) if j != index)
            new_c = Fraction(c) + ai * Fraction(f) / ei
            out.append((new_a, new_c))
        return HalfSpaceSystem(self.dimension - 1, tuple(out)), abs(ei)

    def satisfied(self, w: Sequence[Fraction]) -> bool:
        return all(sum(ai * wi for ai, wi in zip(a, w)) + c >= 0 for a, c in self.inequalities)

    def scaled_rhs(self, k: Fraction) -> "HalfSpaceSystem":
        return HalfSpaceSystem(self.dimension, tuple((a, c * k) for a, c in self.inequalities), self.hyperplane)


def _F(v) -> Fraction:
    return Fraction(v)


def dual_cone_system() -> HalfSpaceSystem:
    """w4 >= w_i >= 0 (i = 1..3), w0 >= w_i + w_j (i < j), on 2w0 - w1 - w2 - w3 + 2w4 = 1."""
    ineqs = []

    def unit(*pairs):
        v = [Fraction(0)] * 5
        for idx, coef in pairs:
            v[idx] = Fraction(coef)
        return tuple(v)

    for i in (1, 2, 3):
        ineqs.append((unit((4, 1), (i, -1)), Fraction(0)))
        ineqs.append((unit((i, 1)), Fraction(0)))
    for i, j in ((1, 2), (1, 3), (2, 3)):
        ineqs.append((unit((0, 1), (i, -1), (j, -1)), Fraction(0)))
    hyper = (unit((0, 2), (1, -1), (2, -1), (3, -1), (4, 2)), Fraction(1))
    return HalfSpaceSystem(5, tuple(ineqs), hyper)


def simplex_system(weights: Sequence[int], rhs: int = 1) -> HalfSpaceSystem:
    """v >= 0 and sum weights_i v_i <= rhs."""
    d = len(weights)
    ineqs = []
    for i in range(d):
        a = [Fraction(0)] * d
        a[i] = Fraction(1)
        ineqs.append((tuple(a), Fraction(0)))
    ineqs.append((tuple(Fraction(-w) for w in weights), Fraction(rhs)))
    return HalfSpaceSystem(d, tuple(ineqs))


@dataclass
class Polytope:
    vertices: list[Vector]
    dimension: int
    # for each vertex, the set of inequality indices tight there
    tight: list[frozenset[int]] = field(default_factory=list)

    @classmethod
    def from_halfspaces(cls, system: HalfSpaceSystem) -> "Polytope":
        d = system.dimension
        seen: dict[Vector, set[int]] = {}
        ineqs = system.inequalities
        for combo in combinations(range(len(ineqs)), d):
            A = [ineqs[i][0] for i in combo]
            b = [-ineqs[i][1] for i in combo]
            w = solve_exact(A, b)
            if w is None or not system.satisfied(w):
                continue
            seen.setdefault(w, set())
        verts = sorted(seen)
        tight = []
        for w in verts:
            active = (i for i, (a, c) in enumerate(ineqs) if sum(ai * wi for ai, wi in zip(a, w)) + c == 0)
            tight.append(frozenset(active))
        for t in tight:
            if len(t) < d:
                raise InvariantError("vertex with fewer than dimension tight constraints")
        return cls(verts, d, tight)

    def _triangulate(self, face: frozenset[int], active: frozenset[int], dim: int) -> list[list[int]]:
        if dim == 0:
            return [[min(face)]]
        base = min(face)
        simplices = []
        seen_facets: set[frozenset[int]] = set()
        constraints = set().union(*(self.tight[v] for v in face)) - active
        for c in sorted(constraints):
            sub = frozenset(v for v in face if c in self.tight[v])
            if base in sub or sub in seen_facets or len(sub) < dim:
                continue
            if affine_rank([self.vertices[v] for v in sub]) != dim - 1:
                continue
            seen_facets.add(sub)
            for s in self._triangulate(sub, active | {c}, dim - 1):
                simplices.append([base] + s)
        return simplices

    def triangulation(self) -> list[list[int]]:
        every = frozenset(range(len(self.vertices)))
        if affine_rank(self.vertices) != self.dimension:
            raise InvariantError("polytope is not full-dimensional")
        return self._triangulate(every, frozenset(), self.dimension)

    def volume(self) -> Fraction:
        d = self.dimension
        total = Fraction(0)
        for s in self.triangulation():
            v0 = self.vertices[s[0]]
            rows = [[a - b for a, b in zip(self.vertices[i], v0)] for i in s[1:]]
            total += abs(det_exact(rows))
        return total / math.factorial(d)


def alpha_invariant() -> Fraction:
    """Volume of the dual-cone slice, measured against dw1..dw4/|coefficient of w0|."""
    reduced, norm = dual_cone_system().eliminate(0)
    return Polytope.from_halfspaces(reduced).volume() / norm


# --- finite field counts -----------------------------------------------------------------


def projective_points(p: int) -> np.ndarray:
    """Normalised representatives of P^2(F_p): first nonzero coordinate equal to 1."""
    pts = [(1, a, b) for a in range(p) for b in range(p)]
    pts += [(0, 1, b) for b in range(p)]
    pts.append((0, 0, 1))
    return np.array(pts, dtype=np.int64)


@lru_cache(maxsize=None)
def point_count_Fp(p: int, chunk: int = 512) -> int:
    """#{(x, y, z) in (P^2)^3 : x.z = 0, y1 z1 = y2 z2 = y3 z3} over F_p.

    Loops over blocks of z; for each z the x- and y-conditions are tested on
    all of P^2 at once.
    """
    if not is_prime(p):
        raise InvariantError(f"{p} is not prime")
    if p > POINT_COUNT_LIMIT:
        raise InvariantError(f"point counting is limited to p <= {POINT_COUNT_LIMIT}")
    P = projective_points(p)
    total = 0
    for start in range(0, len(P), chunk):
        Z = P[start : start + chunk]
        nx = ((P @ Z.T) % p == 0).sum(axis=0)
        yz = (P[:, None, :] * Z[None, :, :]) % p
        ny = ((yz[:, :, 0] == yz[:, :, 1]) & (yz[:, :, 1] == yz[:, :, 2])).sum(axis=0)
        total += int(np.dot(nx, ny))
    return total


def local_density(p: int) -> Fraction:
    return Fraction(point_count_Fp(p), p**3)


def local_density_closed(p: int) -> Fraction:
    P = Fraction(p)
    return 1 + 5 / P + 5 / P**2 + 1 / P**3


# --- archimedean density ------------------------------------------------------------------


def _inner_t(u: float, eps: float) -> float:
    # int_{-1}^{1} min(1/|t+u|, 1) dt, split where |t + u| = 1 and at t = -u
    pts = sorted({-1.0, 1.0, *(x for x in (-u - 1, -u, 1 - u) if -1 < x < 1)})
    return sum(
        integrate.quad(lambda t: min(1.0 / abs(t + u), 1.0) if t != -u else 1.0, a, b, epsabs=eps, epsrel=eps)[0]
        for a, b in zip(pts[:-1], pts[1:])
    )


@dataclass(frozen=True)
class MuInfinity:
    quadrature: float
    closed_form: float
    error_estimate: float


def mu_infinity(eps: float = 1e-12) -> MuInfinity:
    """24 int_0^inf int_{-1}^{1} min(1/|t+u|, 1) / max(u, 1) dt du."""
    f = lambda u: _inner_t(u, eps) / max(u, 1.0)  # noqa: E731
    total = 0.0
    err = 0.0
    for a, b in ((0.0, 1.0), (1.0, 2.0), (2.0, math.inf)):
        v, e = integrate.quad(f, a, b, epsabs=eps, epsrel=eps, limit=200)
        total += v
        err += e
    return MuInfinity(24 * total, MU_INF_CLOSED, 24 * err)


def mu_infinity_pieces(eps: float = 1e-12) -> tuple[float, float]:
    """int_0^2 (2 - u + log(u+1))/max(u,1) du + int_2^inf log((u+1)/(u-1))/u du, and 4 log 2 - 1/2 + pi^2/6."""
    a = integrate.quad(lambda u: (2 - u + math.log1p(u)) / max(u, 1.0), 0, 2, points=[1.0], epsabs=eps, epsrel=eps)[0]
    b = integrate.quad(lambda u: math.log((u + 1) / (u - 1)) / u, 2, math.inf, epsabs=eps, epsrel=eps)[0]
    return a + b, 4 * math.log(2) - 0.5 + math.pi**2 / 6


# --- assembly -------------------------------------------------------------------------------


@dataclass
class ConstantBreakdown:
    alpha: Fraction
    mu_inf_closed: float
    mu_inf_quadrature: float
    mu_p: dict[int, Fraction]
    C: SeriesApprox
    tau_H: float
    theta_H: float
    predicted_coeff: float
    reconciliation_delta: float
    tail_bound: float
    alpha_mu_residual: float
    counted_primes: int

    @property
    def reconciled(self) -> bool:
        return self.reconciliation_delta <= self.tail_bound


def constant_assembly(P: int, count_limit: int = POINT_COUNT_LIMIT, eps: float = 1e-12) -> ConstantBreakdown:
    """tau_H = mu_inf prod_{p<=P} (1-1/p)^5 mu_p and Theta_H = alpha tau_H.

    mu_p comes from point counting for p <= count_limit and from the closed
    density beyond. The comparison value is (pi^2 - 3 + 24 log 2)/144 * C(P);
    both sides omit the same factors p > P, so their difference is held to
    the tail bound of that omission.
    """
    if P < 2:
        raise InvariantError("prime cutoff must be at least 2")
    alpha = alpha_invariant()
    mu = mu_infinity(eps)
    mu_p: dict[int, Fraction] = {}
    prod = 1.0
    for p in primes_upto(P):
        dens = local_density(p) if p <= count_limit else local_density_closed(p)
        mu_p[p] = dens
        prod *= float((1 - Fraction(1, p)) ** 5 * dens)
    tau_H = mu.quadrature * prod
    theta_H = float(alpha) * tau_H
    C = constant_C(P).approx
    coeff = ALPHA_MU_CLOSED * C.value
    tail = ALPHA_MU_CLOSED * C.tail_bound
    residual = abs(float(alpha) * MU_INF_CLOSED - ALPHA_MU_CLOSED)
    counted = sum(1 for p in mu_p if p <= count_limit)
    return ConstantBreakdown(
        alpha, MU_INF_CLOSED, mu.quadrature, mu_p, C, tau_H, theta_H, coeff,
        abs(theta_H - coeff), tail, residual, counted,
    )


def c_factor_matches_density(p: int) -> bool:
    """(1 - 1/p)^5 * local_density(p) == c_factor(p) as rationals."""
    return (1 - Fraction(1, p)) ** 5 * local_density(p) == c_factor(p)
