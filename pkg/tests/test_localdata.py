from __future__ import annotations

import math
from fractions import Fraction
from itertools import permutations

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from manin_threefold.errors import InvariantError
from manin_threefold.localdata import (
    E_ONE,
    CoeffTriple,
    LocalFactorTable,
    c_factor,
    constant_C,
    f_one_euler,
    f_series,
    f_series_truncated,
    fgh_weight,
    moebius_constant_check,
    phi_dirichlet_check,
    singular_series_euler,
    singular_series_exact,
    singular_series_local_sum,
    singular_series_product,
    singular_series_truncated,
)
from manin_threefold.numtheory import divisors, euler_phi, moebius

triples = st.tuples(st.integers(1, 30), st.integers(1, 30), st.integers(1, 30))


def plain_series(r, Q):
    return sum(euler_phi(q) * math.gcd(q, r[0]) * math.gcd(q, r[1]) * math.gcd(q, r[2]) / q**3 for q in range(1, Q + 1))


def test_e_one_is_zeta_ratio():
    assert E_ONE == pytest.approx(float(mpmath.zeta(2) / mpmath.zeta(3)), rel=1e-15)


@pytest.mark.parametrize("r", [(1, 1, 1), (2, 3, 4), (6, 6, 1), (5, 10, 15)])
def test_truncated_matches_plain_loop(r):
    assert singular_series_truncated(r, 3000).value == pytest.approx(plain_series(r, 3000), rel=1e-13)


@given(triples)
def test_exact_form_within_truncation_tail(r):
    t = singular_series_truncated(r, 50_000)
    assert t.contains(singular_series_exact(r))


@given(triples, st.sampled_from([2, 3, 5, 7, 11, 13]))
def test_euler_factor_closed_form_is_exact(r, p):
    assert singular_series_euler(r, p) == singular_series_local_sum(r, p)


@given(triples, st.sampled_from([2, 3, 5]))
def test_euler_factor_against_partial_local_sum(r, p):
    # direct partial sum over q = p^k, k <= 40, from the definition
    def phi(q):
        return q - q // p if q > 1 else 1

    partial = sum(
        Fraction(phi(p**k) * math.gcd(p**k, r[0]) * math.gcd(p**k, r[1]) * math.gcd(p**k, r[2]), p ** (3 * k))
        for k in range(41)
    )
    assert abs(float(singular_series_euler(r, p) - partial)) < 1e-20


@given(triples)
def test_symmetry_and_positivity(r):
    vals = {round(singular_series_exact(tuple(r[i] for i in perm)), 13) for perm in permutations(range(3))}
    assert len(vals) == 1
    assert singular_series_exact(r) > 0


@given(triples, st.integers(1, 12))
def test_scaling(r, d):
    assert singular_series_exact(tuple(d * v for v in r)) == pytest.approx(d * singular_series_exact(r), rel=1e-12)


@given(triples)
def test_product_and_exact_agree(r):
    p = singular_series_product(r, 10**5)
    assert p.value <= singular_series_exact(r) * (1 + 1e-12)
    assert p.contains(singular_series_exact(r), extra=1e-12)


@given(st.integers(1, 200))
def test_phi_dirichlet(a):
    partial, closed, tail = phi_dirichlet_check(a, 4000)
    assert abs(partial - closed) <= tail


@given(st.integers(1, 500))
def test_fgh_weight_matches_triple_loop(m):
    direct = Fraction(0)
    for g in divisors(m):
        for f in divisors(m // g):
            direct += Fraction(moebius(g), g)
    assert fgh_weight(m) == direct


@pytest.mark.parametrize("r", [(1, 1, 1), (1, 2, 3), (3, 4, 5), (2, 9, 1)])
def test_f_series_split_matches_truncation(r):
    full = f_series(r)
    trunc = f_series_truncated(r, 4000)
    assert abs(full.value - trunc.value) <= trunc.tail_bound + full.tail_bound


def test_f_one_euler_product():
    value = 1.0
    for p in [q for q in range(2, 20000) if all(q % s for s in range(2, math.isqrt(q) + 1))]:
        value *= float(f_one_euler(p))
    assert value == pytest.approx(E_ONE, rel=1e-4)


def test_f_needs_coprime_triple():
    with pytest.raises(InvariantError):
        f_series((2, 4, 6))


def test_local_factor_table():
    table = LocalFactorTable.build((2, 3, 9), P=30)
    for p, (E, F) in table.entries.items():
        if p not in (2, 3):
            assert E == 1 + Fraction(1, p * (p + 1))
        assert F == pytest.approx(float(E), rel=1e-9)


def test_c_factor_values():
    assert c_factor(2) == Fraction(39, 256)
    for p in (3, 5, 7, 101):
        assert c_factor(p) == (1 - Fraction(1, p)) ** 5 * (1 + Fraction(5, p) + Fraction(5, p**2) + Fraction(1, p**3))
        assert c_factor(p) < 1


def test_constant_C_brackets():
    small = constant_C(10**4)
    big = constant_C(10**6, keep_factors=False)
    assert small.value * math.exp(-11 / 10**4) <= big.value <= small.value
    assert big.value == pytest.approx(0.0299840024, abs=2e-9)
    assert big.approx.tail_bound < 4e-7


def test_moebius_constant_gaps_shrink():
    gaps = [moebius_constant_check(T, prime_cutoff=10**5).gap for T in (1, 2, 3)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.04


def test_coeff_triple():
    r = CoeffTriple.of((4, 6, 10))
    assert r.gcd() == 2
    assert r.prime_support() == (2, 3, 5)
    assert r.p_part(2).as_tuple() == (4, 2, 2)
    with pytest.raises(InvariantError):
        CoeffTriple.of((0, 1, 1))
