from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from manin_threefold.errors import InvariantError
from manin_threefold.specfun import dilog, kernel_K, log_kernel_K, sici

mpmath.mp.dps = 30


@given(st.floats(1e-6, 500.0))
def test_si_ci_match_mpmath(x):
    si, ci = sici(x)
    assert si == pytest.approx(float(mpmath.si(x)), abs=2e-15, rel=1e-14)
    assert ci == pytest.approx(float(mpmath.ci(x)), abs=2e-15, rel=1e-13)


def test_si_is_odd_and_vectorised():
    xs = np.linspace(-60, 60, 301)
    si, _ = sici(xs)
    assert np.allclose(si, -si[::-1], atol=0)
    assert np.allclose(si, [float(mpmath.si(x)) for x in xs], atol=2e-15)


def test_si_limits():
    assert sici(1e8)[0] == pytest.approx(math.pi / 2, abs=1e-8)
    assert sici(0.0)[0] == 0.0


@given(st.floats(-50.0, 1.0))
def test_dilog_matches_mpmath(x):
    assert dilog(x) == pytest.approx(float(mpmath.polylog(2, x)), abs=1e-14, rel=1e-14)


def test_dilog_rejects_above_one():
    with pytest.raises(InvariantError):
        dilog(1.5)


def reference_K(s):
    s = mpmath.mpc(s)
    return complex(mpmath.gamma(s) * mpmath.cos(mpmath.pi * s / 2) * (1 - mpmath.power(2, s - 1)) ** 2 / (1 - s) ** 2)


@given(st.floats(0.05, 0.95), st.floats(-40.0, 40.0))
def test_kernel_matches_mpmath(sigma, t):
    s = complex(sigma, t)
    ref = reference_K(s)
    assert abs(kernel_K(s) - ref) <= 1e-12 * abs(ref) + 1e-300


def test_kernel_is_vectorised_and_guards_pole():
    s = np.array([1 / 3 + 1j, 1 / 3 - 2j])
    assert np.allclose(np.exp(log_kernel_K(s)), [reference_K(v) for v in s], rtol=1e-12)
    with pytest.raises(InvariantError):
        kernel_K(1 + 1e-10j)
