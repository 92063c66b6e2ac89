from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from manin_threefold.errors import InvariantError
from manin_threefold.oscint import (
    CUBED_SINE_TAIL_CLOSED,
    BoxSpec,
    QuadratureSpec,
    box_fourier_decay_constant,
    box_fourier_envelope,
    box_fourier_factor,
    cubed_sine_tail_check,
    dilog_identities,
    is_degenerate_box,
    mellin_crosscheck,
    sine_tail,
    singular_integral,
    singular_integral_bound,
)


def reference_factor(r, X, Y, alpha):
    """Integrate e(alpha r x y) over the dyadic region: y analytically, x by mpmath."""
    b = alpha * r
    if b == 0:
        return X * Y

    def over_y(x):
        # 2 int_{Y/2}^{Y} cos(2 pi b x y) dy
        return (mpmath.sin(2 * mpmath.pi * b * x * Y) - mpmath.sin(mpmath.pi * b * x * Y)) / (mpmath.pi * b * x)

    return float(2 * mpmath.quad(over_y, mpmath.linspace(X / 2, X, 9)))


@given(st.integers(1, 4), st.floats(1, 12), st.floats(1, 12), st.floats(0, 3))
def test_box_factor_matches_reference(r, X, Y, alpha):
    assert box_fourier_factor(r, X, Y, alpha) == pytest.approx(reference_factor(r, X, Y, alpha), abs=1e-10, rel=1e-9)


@given(st.integers(1, 4), st.floats(1, 30), st.floats(1, 30), st.floats(1e-3, 50))
def test_box_factor_bounds(r, X, Y, alpha):
    F = box_fourier_factor(r, X, Y, alpha)
    assert abs(F) <= X * Y * (1 + 1e-12)
    assert abs(F) <= box_fourier_decay_constant(r, X, Y) / alpha**2 + 1e-12
    assert abs(F) <= 4 * box_fourier_envelope(r, X, Y, alpha)
    assert box_fourier_factor(r, X, Y, -alpha) == pytest.approx(F, abs=1e-15)


def test_box_factor_near_zero_is_continuous():
    a = np.array([0.0, 1e-9, 1e-6, 5e-6, 1e-5, 2e-5])
    F = box_fourier_factor(1, 3.0, 5.0, a)
    assert np.allclose(F, [reference_factor(1, 3.0, 5.0, float(v)) for v in a], rtol=1e-12)


def monte_carlo_density(r, box, n=4_000_000, eps=0.5, seed=7):
    rng = np.random.default_rng(seed)
    F = np.zeros(n)
    for rj, X, Y in zip(r, box.X, box.Y):
        xs = rng.uniform(X / 2, X, n) * rng.choice((-1, 1), n)
        ys = rng.uniform(Y / 2, Y, n) * rng.choice((-1, 1), n)
        F += rj * xs * ys
    vol = math.prod(X * Y for X, Y in zip(box.X, box.Y))
    return vol * np.mean(np.abs(F) < eps) / (2 * eps)


@pytest.mark.parametrize("r,X,Y", [((1, 1, 1), (4, 4, 4), (4, 4, 4)), ((1, 2, 1), (8, 4, 6), (2, 4, 8))])
def test_singular_integral_matches_real_density(r, X, Y):
    box = BoxSpec(X, Y)
    val = singular_integral(r, box).value
    assert monte_carlo_density(r, box) == pytest.approx(val, rel=0.03)


def test_cube_value():
    for W in (2.0, 8.0, 32.0):
        assert singular_integral((1, 1, 1), BoxSpec.cube(W)).value == pytest.approx(0.12290029448 * W**4, rel=1e-9)


@given(st.permutations(range(3)))
def test_permutation_invariance(perm):
    r, box = (1, 2, 3), BoxSpec((4.0, 2.0, 6.0), (3.0, 5.0, 2.0))
    base = singular_integral(r, box).value
    permuted = singular_integral(tuple(r[i] for i in perm), box.permuted(perm)).value
    assert permuted == pytest.approx(base, rel=1e-8)


@given(st.integers(2, 9))
def test_scaling_in_r(d):
    box = BoxSpec((4.0, 3.0, 5.0), (2.0, 6.0, 4.0))
    base = singular_integral((1, 2, 1), box).value
    assert singular_integral((d, 2 * d, d), box).value == pytest.approx(base / d, rel=1e-8)


def test_bound_shape():
    for W in (4.0, 16.0):
        box = BoxSpec.cube(W)
        assert singular_integral((1, 1, 1), box).value <= singular_integral_bound((1, 1, 1), box)


def test_not_monotone_in_box_sides():
    # dyadic shells are not nested: moving one shell outward can lower the density
    base = BoxSpec((8.0, 8.0, 8.0), (2.0, 4.0, 8.0))
    wider = BoxSpec((8.0, 8.0, 12.0), (2.0, 4.0, 8.0))
    a, b = singular_integral((1, 1, 1), base).value, singular_integral((1, 1, 1), wider).value
    assert b < a / 3
    assert monte_carlo_density((1, 1, 1), wider) == pytest.approx(b, rel=0.05)


def test_degenerate_box_integral_vanishes():
    box = BoxSpec((2.0, 2.0, 16.0), (2.0, 2.0, 16.0))
    assert is_degenerate_box((1, 1, 1), box)
    res = singular_integral((1, 1, 1), box)
    assert abs(res.value) <= res.tolerance and res.converged


def test_quadrature_failure_and_validation():
    from manin_threefold.errors import QuadratureError

    with pytest.raises(QuadratureError) as info:
        strict = QuadratureSpec(max_subdivisions=1)  # one pass has nothing to compare against
        singular_integral((1, 1, 1), BoxSpec.cube(8.0), strict)
    assert info.value.partial is not None
    with pytest.raises(InvariantError):
        QuadratureSpec(abs_tol=0)
    with pytest.raises(InvariantError):
        BoxSpec((0.5, 1, 1), (1, 1, 1))


def test_mellin_crosscheck_and_limits():
    rep = mellin_crosscheck((1, 1, 2), BoxSpec((2.0, 4.0, 2.0), (4.0, 2.0, 2.0)))
    assert rep.rel_diff <= 1e-3
    assert abs(rep.imaginary_part) <= 1e-3 * abs(rep.mellin_value)
    with pytest.raises(InvariantError):
        mellin_crosscheck((1, 1, 1), BoxSpec.cube(32.0))


@given(st.floats(0.01, 80.0))
def test_sine_tail_matches_mpmath(y):
    ref = mpmath.sin(y) / y - mpmath.ci(y)
    assert float(sine_tail(y)) == pytest.approx(float(ref), abs=1e-14, rel=1e-12)


def test_sine_tail_against_direct_quadrature():
    for y in (0.5, 3.0, 10.0):
        ref = mpmath.quadosc(lambda t: mpmath.sin(t) / t**2, [y, mpmath.inf], omega=1)
        assert float(sine_tail(y)) == pytest.approx(float(ref), abs=1e-12)


def test_cubed_sine_tail_integral():
    rep = cubed_sine_tail_check()
    assert rep.abs_diff <= 1e-6
    assert rep.closed_form == pytest.approx(math.pi * (math.pi**2 - 3 + 24 * math.log(2)) / 8)
    assert CUBED_SINE_TAIL_CLOSED == pytest.approx(9.230445610852, abs=1e-11)


def test_dilog_identities():
    assert all(abs(v) < 1e-13 for v in dilog_identities().values())
