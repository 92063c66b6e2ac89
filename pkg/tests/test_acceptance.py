"""The ten acceptance criteria at their stated tolerances.

One PASS/FAIL line per criterion is printed in the terminal summary.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from manin_threefold.cmvalidate import box_count_exact, count_inversions, cube_asymptotic_check
from manin_threefold.expsums import bound_audit, identity_sweep
from manin_threefold.geometry import (
    ALPHA_MU_CLOSED,
    MU_INF_CLOSED,
    alpha_invariant,
    constant_assembly,
    mu_infinity,
    point_count_Fp,
)
from manin_threefold.localdata import (
    c_factor,
    f_series,
    singular_series_exact,
    singular_series_product,
    singular_series_truncated,
)
from manin_threefold.numtheory import primes_upto
from manin_threefold.oscint import (
    BoxSpec,
    cubed_sine_tail_check,
    is_degenerate_box,
    mellin_crosscheck,
    singular_integral,
)
from manin_threefold.points import enumerate_direct, enumerate_torsor, moebius_inversion_check, random_finite_G


@pytest.fixture(scope="module")
def enumerations_1000():
    return enumerate_direct(1000, keep_points=True), enumerate_torsor(1000, keep_points=True)


def test_criterion_01_counts_agree_for_every_bound(enumerations_1000):
    d, t = enumerations_1000
    bounds = range(1, 1001)
    assert d.counts_upto(bounds) == t.counts_upto(bounds)
    assert d.points == t.points
    assert d.count == t.count == 110856


@pytest.mark.parametrize("B", [1, 10, 57, 100, 333, 1000])
def test_criterion_01_torsor_is_four_to_one(B, enumerations_1000):
    t = enumerations_1000[1] if B == 1000 else enumerate_torsor(B)
    assert t.raw_count == 4 * t.count
    assert t.count == enumerations_1000[0].counts_upto([B])[B]


def test_criterion_02_closed_form_identity():
    rep = identity_sweep(30, 30, 10, tol=1e-8)
    assert rep.cases == 30 * 30 * 20**3
    assert rep.mismatches == []
    assert rep.max_abs_diff <= 1e-8


def test_criterion_02_no_bound_violations():
    rep = bound_audit()
    violations = rep.mismatches
    assert not violations, (
        f"{len(violations)} bound violations; max ratios 01={rep.max_ratio_01:.3g}, "
        f"10={rep.max_ratio_10:.3g}, 11={rep.max_ratio_11:.3g}, weil={rep.max_ratio_weil:.3g}; "
        f"first: {violations[0]}"
    )


GRID_20 = [
    (1, 1, 1), (1, 1, 2), (1, 2, 3), (2, 2, 2), (1, 1, 4), (2, 3, 5), (3, 3, 1), (4, 6, 9), (5, 5, 5), (1, 7, 7),
    (2, 4, 8), (6, 10, 15), (1, 1, 9), (3, 4, 5), (12, 1, 1), (2, 9, 9), (8, 8, 1), (5, 7, 11), (1, 6, 6), (4, 4, 4),
]


@pytest.mark.parametrize("r", GRID_20)
def test_criterion_03_truncated_vs_euler_product(r):
    t = singular_series_truncated(r, 200_000)
    p = singular_series_product(r, 10**6)
    assert abs(t.value - p.value) <= t.tail_bound + p.tail_bound


def test_criterion_03_scaling():
    worst = 0.0
    for r in GRID_20:
        base = singular_series_product(r, 10**6).value
        for d in (2, 3, 5, 6, 12):
            scaled = singular_series_product(tuple(d * v for v in r), 10**6).value
            worst = max(worst, abs(scaled - d * base) / (d * base))
    assert worst <= 1e-6


def test_criterion_03_f_equals_e():
    triples = [
        (a, b, c) for a in range(1, 9) for b in range(1, 9) for c in range(1, 9) if math.gcd(a, math.gcd(b, c)) == 1
    ]
    assert len(triples) == 439
    worst = max(abs(f_series(r).value - singular_series_exact(r)) / singular_series_exact(r) for r in triples)
    assert worst <= 1e-4


def test_criterion_04_c_factor_and_point_counts():
    for p in primes_upto(97):
        numerator = (p * p + 4 * p + 1) * (p + 1)
        assert point_count_Fp(p) == numerator
        assert c_factor(p) == Fraction(p - 1, p) ** 5 * Fraction(numerator, p**3)


def test_criterion_05_relative_error_decreases():
    reps = cube_asymptotic_check((1, 1, 1), [8, 16, 32, 64])
    rel = [r.rel_error for r in reps]
    assert count_inversions(rel) <= 1
    assert rel[-1] <= 0.20


@pytest.mark.parametrize(
    "r,X,Y",
    [((1, 1, 1), (2, 2, 16), (2, 2, 16)), ((1, 1, 12), (1, 1, 2), (1, 1, 4)), ((2, 1, 1), (8, 1, 1), (8, 2, 1))],
)
def test_criterion_05_degenerate_boxes(r, X, Y):
    box = BoxSpec(X, Y)
    assert is_degenerate_box(r, box)
    assert box_count_exact(r, box) == 0
    res = singular_integral(r, box)
    assert abs(res.value) <= res.tolerance


@pytest.mark.parametrize(
    "r,X,Y",
    [((1, 1, 1), (2, 2, 2), (2, 2, 2)), ((1, 2, 3), (4, 2, 2), (2, 4, 2)), ((2, 1, 1), (2, 4, 4), (4, 2, 4))],
)
def test_criterion_06_mellin_crosscheck(r, X, Y):
    rep = mellin_crosscheck(r, BoxSpec(X, Y))
    assert rep.rel_diff <= 1e-3


def test_criterion_07_cubed_sine_tail_integral():
    rep = cubed_sine_tail_check()
    assert rep.abs_diff <= 1e-6


def test_criterion_08_geometry_exactness():
    assert alpha_invariant() == Fraction(1, 576)
    assert abs(mu_infinity().quadrature - (96 * math.log(2) - 12 + 4 * math.pi**2)) <= 1e-6
    assert abs(float(alpha_invariant()) * MU_INF_CLOSED - ALPHA_MU_CLOSED) <= 1e-12


def test_criterion_09_constant_reconciliation():
    br = constant_assembly(1000)
    assert br.reconciliation_delta <= br.tail_bound
    assert br.counted_primes == len(primes_upto(97))


def test_criterion_10_moebius_inversion():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        check = moebius_inversion_check(random_finite_G(rng))
        assert check.equal, (check.lhs, check.rhs)
