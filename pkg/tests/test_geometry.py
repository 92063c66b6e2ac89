from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from manin_threefold.errors import InvariantError
from manin_threefold.geometry import (
    ALPHA_MU_CLOSED,
    MU_INF_CLOSED,
    HalfSpaceSystem,
    Polytope,
    affine_rank,
    alpha_invariant,
    c_factor_matches_density,
    constant_assembly,
    det_exact,
    dual_cone_system,
    local_density,
    local_density_closed,
    mu_infinity,
    mu_infinity_pieces,
    point_count_Fp,
    projective_points,
    simplex_system,
    solve_exact,
)


def naive_count(p):
    """Pure-python count over all triples of projective points."""
    P = [tuple(v) for v in projective_points(p).tolist()]
    total = 0
    for x, y, z in product(P, P, P):
        if sum(a * b for a, b in zip(x, z)) % p:
            continue
        a, b, c = (y[0] * z[0]) % p, (y[1] * z[1]) % p, (y[2] * z[2]) % p
        if a == b == c:
            total += 1
    return total


@pytest.mark.parametrize("p", [2, 3, 5])
def test_point_count_matches_naive(p):
    assert point_count_Fp(p) == naive_count(p)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13, 29, 31])
def test_point_count_closed_form(p):
    assert point_count_Fp(p) == (p * p + 4 * p + 1) * (p + 1)
    assert local_density(p) == local_density_closed(p)
    assert c_factor_matches_density(p)


def test_point_count_rejects():
    with pytest.raises(InvariantError):
        point_count_Fp(4)
    with pytest.raises(InvariantError):
        point_count_Fp(101)


def test_projective_points_size():
    for p in (2, 3, 7):
        assert len(projective_points(p)) == p * p + p + 1


def test_alpha_is_exact():
    assert alpha_invariant() == Fraction(1, 576)
    reduced, norm = dual_cone_system().eliminate(0)
    assert norm == 2
    assert Polytope.from_halfspaces(reduced).volume() == Fraction(1, 288)


def test_simplex_volume():
    assert Polytope.from_halfspaces(simplex_system([3, 4, 3, 2])).volume() == Fraction(1, 1728)
    for w in ([1, 1], [2, 5], [1, 2, 3]):
        expected = Fraction(1, math.factorial(len(w)) * math.prod(w))
        assert Polytope.from_halfspaces(simplex_system(w)).volume() == expected


def test_unit_cube_volume():
    ineqs = []
    for i in range(3):
        e = [Fraction(0)] * 3
        e[i] = Fraction(1)
        ineqs.append((tuple(e), Fraction(0)))
        ineqs.append((tuple(-v for v in e), Fraction(1)))
    cube = Polytope.from_halfspaces(HalfSpaceSystem(3, tuple(ineqs)))
    assert len(cube.vertices) == 8
    assert cube.volume() == 1


@given(st.integers(1, 5), st.integers(1, 5))
def test_volume_scales_with_rhs(num, den):
    k = Fraction(num, den)
    reduced, _ = dual_cone_system().eliminate(0)
    assert Polytope.from_halfspaces(reduced.scaled_rhs(k)).volume() == k**4 / 288


def test_vertices_satisfy_constraints():
    reduced, _ = dual_cone_system().eliminate(0)
    poly = Polytope.from_halfspaces(reduced)
    assert all(reduced.satisfied(v) for v in poly.vertices)
    assert affine_rank(poly.vertices) == 4


def test_exact_linear_algebra():
    A = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]]
    assert solve_exact(A, [Fraction(3), Fraction(5)]) == (Fraction(4, 5), Fraction(7, 5))
    assert solve_exact([[1, 2], [2, 4]], [1, 2]) is None
    assert det_exact(A) == 5


def test_mu_infinity():
    mu = mu_infinity()
    assert mu.quadrature == pytest.approx(96 * math.log(2) - 12 + 4 * math.pi**2, abs=1e-6)
    quad, closed = mu_infinity_pieces()
    assert quad == pytest.approx(closed, abs=1e-10)
    assert closed == pytest.approx(4 * math.log(2) - 0.5 + math.pi**2 / 6)


def test_alpha_mu_identity():
    assert float(alpha_invariant()) * MU_INF_CLOSED == pytest.approx(ALPHA_MU_CLOSED, abs=1e-12)


def test_constant_assembly_small_cutoff():
    br = constant_assembly(50, count_limit=13)
    assert br.reconciled
    assert br.alpha == Fraction(1, 576)
    assert br.mu_p[2] == Fraction(39, 8)
    assert br.counted_primes == 6
