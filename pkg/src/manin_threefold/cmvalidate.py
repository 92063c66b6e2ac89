"""Exact counts of r1 x1 y1 + r2 x2 y2 + r3 x3 y3 = 0 in dyadic boxes.

Counts are compared with the main term E_r * I_r, where E_r is the singular
series and I_r the singular integral of the same box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CostCapExceeded, InvariantError
from .localdata import CoeffTriple, singular_series_exact
from .oscint import BoxSpec, QuadratureSpec, singular_integral

DEFAULT_COST_CAP = 2 * 10**9


def _dyadic_range(Z: float) -> np.ndarray:
    """Integers z with Z/2 < |z| <= Z."""
    top = int(math.floor(Z))
    pos = np.array([z for z in range(1, top + 1) if 2 * z > Z], dtype=np.int64)
    return np.concatenate([-pos[::-1], pos])


def _product_histogram(r: int, X: float, Y: float) -> tuple[np.ndarray, int]:
    xs, ys = _dyadic_range(X), _dyadic_range(Y)
    vals = r * np.outer(xs, ys).ravel()
    off = int(np.abs(vals).max())
    return np.bincount(vals + off, minlength=2 * off + 1), off


def box_count_cost(r, box: BoxSpec) -> int:
    r = CoeffTriple.of(r)
    spans = [2 * int(rj * math.floor(X) * math.floor(Y)) + 1 for rj, X, Y in zip(r.as_tuple(), box.X, box.Y)]
    return spans[0] * spans[1] + sum(int(X * Y) for X, Y in zip(box.X, box.Y))


def box_count_exact(r, box: BoxSpec, cost_cap: int = DEFAULT_COST_CAP) -> int:
    """Number of integer solutions with X_j/2 < |x_j| <= X_j, Y_j/2 < |y_j| <= Y_j.

    Histograms of the three products r_j x_j y_j; the first two are convolved
    into the distribution of their sum, which is matched against the negated
    third histogram.
    """
    r = CoeffTriple.of(r)
    cost = box_count_cost(r, box)
    if cost > cost_cap:
        raise CostCapExceeded(f"box count cost {cost} exceeds cap {cost_cap}")
    hists = [_product_histogram(rj, X, Y) for rj, X, Y in zip(r.as_tuple(), box.X, box.Y)]
    (h1, o1), (h2, o2), (h3, o3) = hists
    if h1.size == 0 or h2.size == 0 or h3.size == 0:
        return 0
    c12 = np.convolve(h1, h2)  # index i <-> sum i - (o1 + o2)
    o12 = o1 + o2
    # need s = -w with w = k - o3, i.e. index i = o12 + o3 - k
    k = np.arange(h3.size)
    i = o12 + o3 - k
    ok = (i >= 0) & (i < c12.size)
    return int(np.dot(c12[i[ok]].astype(object), h3[k[ok]].astype(object)))


@dataclass
class BoxCountReport:
    r: tuple[int, int, int]
    box: BoxSpec
    exact_count: int
    main_term: float
    abs_error: float
    bound_shape: float
    ratio: float
    rel_error: float
    integral_error: float

    def to_dict(self) -> dict:
        return {
            "r": list(self.r),
            "X": list(self.box.X),
            "Y": list(self.box.Y),
            "exact_count": self.exact_count,
            "main_term": self.main_term,
            "abs_error": self.abs_error,
            "bound_shape": self.bound_shape,
            "ratio": self.ratio,
            "rel_error": self.rel_error,
            "integral_error": self.integral_error,
        }


def error_envelope(r, box: BoxSpec, eps: float = 0.1) -> float:
    """(prod r_j X_j Y_j)^(1+eps) / (max_j r_j X_j Y_j * min side^(1/6)), implied constant 1."""
    r = CoeffTriple.of(r)
    v = [rj * p for rj, p in zip(r.as_tuple(), box.products())]
    return (v[0] * v[1] * v[2]) ** (1 + eps) / (max(v) * min(*box.X, *box.Y) ** (1 / 6))


def box_report(r, box: BoxSpec, q: QuadratureSpec | None = None, cost_cap: int = DEFAULT_COST_CAP) -> BoxCountReport:
    r = CoeffTriple.of(r)
    N = box_count_exact(r, box, cost_cap)
    integral = singular_integral(r, box, q)
    main = singular_series_exact(r.as_tuple()) * integral.value
    err = abs(N - main)
    env = error_envelope(r, box)
    rel = err / N if N else math.inf
    return BoxCountReport(r.as_tuple(), box, N, main, err, env, err / env, rel, integral.total_error)


def cube_asymptotic_check(r, W_list, q: QuadratureSpec | None = None) -> list[BoxCountReport]:
    """Reports for the cubes X = Y = (W, W, W), in the order given."""
    return [box_report(r, BoxSpec.cube(W), q) for W in W_list]


def count_inversions(values) -> int:
    """Number of adjacent steps where the sequence goes up."""
    return sum(1 for a, b in zip(values, values[1:]) if b > a)


def scaled_count_identity(r, box: BoxSpec, d: int) -> tuple[int, int]:
    """(N_{d r}, N_r): dividing the equation by d leaves its solutions unchanged."""
    if d < 1:
        raise InvariantError("scale must be positive")
    r = CoeffTriple.of(r)
    return box_count_exact(r.scaled(d), box), box_count_exact(r, box)
