"""Integral sine and cosine, the dilogarithm, and the Mellin kernel K(s).

Si, Ci and Li2 are thin wrappers over scipy.special with the sign and domain
conventions used here.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import InvariantError


def sici(x) -> tuple[np.ndarray | float, np.ndarray | float]:
    """(Si(x), Ci(x)); Ci is taken at |x| (its real part for negative x)."""
    arr = np.asarray(x, dtype=float)
    si, ci = special.sici(np.abs(arr))
    si = np.where(arr < 0, -si, si)
    if arr.ndim == 0:
        return float(si), float(ci)
    return si, ci


def integral_sine(x):
    return sici(x)[0]


def cosine_integral(x):
    return sici(x)[1]


def dilog(x: float) -> float:
    """Real dilogarithm Li2(x) for x <= 1."""
    if x > 1:
        raise InvariantError("real dilogarithm is only provided for x <= 1")
    return float(special.spence(1.0 - x))


# --- Mellin kernel ------------------------------------------------------------


def _log_cos_half_pi(s: np.ndarray) -> np.ndarray:
    """log cos(pi s / 2), stable for large |Im s|."""
    z = 0.5 * np.pi * s
    up = z.imag >= 0
    out = np.empty_like(z)
    zu, zd = z[up], z[~up]
    out[up] = -1j * zu + np.log1p(np.exp(2j * zu)) - math.log(2)
    out[~up] = 1j * zd + np.log1p(np.exp(-2j * zd)) - math.log(2)
    return out


def log_kernel_K(s) -> np.ndarray:
    """log of Gamma(s) cos(pi s/2) (1 - 2^(s-1))^2 / (1 - s)^2 (any branch)."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(np.abs(1 - s) < 1e-8):
        raise InvariantError("kernel K evaluated too close to s = 1")
    two = np.log(1 - np.exp((s - 1) * math.log(2)))
    return special.loggamma(s) + _log_cos_half_pi(s) + 2 * two - 2 * np.log(1 - s)


def kernel_K(s):
    """Gamma(s) cos(pi s/2) (1 - 2^(s-1))^2 / (1 - s)^2.

    The double zero of the numerator at s = 1 cancels the pole; points within
    1e-8 of s = 1 are rejected rather than evaluated by cancellation.
    """
    scalar = np.ndim(s) == 0
    out = np.exp(log_kernel_K(s))
    return complex(out[0]) if scalar else out
