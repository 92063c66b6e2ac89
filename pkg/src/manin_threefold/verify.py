"""Verification suites run by ``verify``: desk-sized versions of the module checks.

Each suite returns {"checks": {name: {..., "passed": bool}}, "passed": bool}.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def _suite(checks: dict[str, dict]) -> dict:
    return {"checks": checks, "passed": all(c["passed"] for c in checks.values())}


def suite_expsums(seed: int) -> dict:
    from .expsums import (
        TwistedSumParams,
        bound_audit,
        identity_sweep,
        kloosterman,
        kloosterman_crt,
        twisted_sum_closed,
    )

    sweep = identity_sweep(12, 12, 4)
    audit = bound_audit()
    rng = np.random.default_rng(seed)
    crt_worst = 0.0
    for _ in range(50):
        q1, q2 = 0, 0
        while math.gcd(q1, q2) != 1:
            q1, q2 = (int(v) for v in rng.integers(1, 30, size=2))
        a, b = (int(v) for v in rng.integers(-50, 50, size=2))
        crt_worst = max(crt_worst, abs(kloosterman(a, b, q1 * q2) - kloosterman_crt(a, b, q1, q2)))
    h0 = twisted_sum_closed(TwistedSumParams(1, 0, 0, 0, 2))
    checks = {
        "identity_sweep": {
            "grid": {"r_max": sweep.r_max, "x_max": sweep.x_max, "h_max": sweep.h_max},
            "cases": sweep.cases,
            "max_abs_diff": sweep.max_abs_diff,
            "mismatches": sweep.mismatches,
            "passed": not sweep.mismatches,
        },
        "bound_audit": {
            **audit.to_dict(),
            "mismatch_count": len(audit.mismatches),
            "mismatches": audit.mismatches[:20],
            "passed": not audit.mismatches,
        },
        "kloosterman_crt": {"max_abs_diff": crt_worst, "passed": crt_worst < 1e-9},
        "h_zero_case": {"value": h0, "expected": 3, "passed": abs(h0 - 3) < 1e-12},
    }
    return _suite(checks)


def suite_localdata(seed: int) -> dict:
    from .localdata import (
        constant_C,
        f_series,
        singular_series_euler,
        singular_series_exact,
        singular_series_local_sum,
        singular_series_product,
        singular_series_truncated,
    )

    rng = np.random.default_rng(seed)
    triples = [tuple(int(v) for v in rng.integers(1, 13, size=3)) for _ in range(8)]
    worst_tail = 0.0
    for r in triples:
        t = singular_series_truncated(r, 20000)
        p = singular_series_product(r, 10**5)
        gap = abs(t.value - p.value)
        worst_tail = max(worst_tail, gap / (t.tail_bound + p.tail_bound))
    euler_ok = all(
        singular_series_euler(r, q) == singular_series_local_sum(r, q) for r in triples for q in (2, 3, 5, 7, 11)
    )
    scale_worst = 0.0
    for r in triples[:4]:
        base = singular_series_exact(r)
        for d in (2, 3, 6):
            scaled = singular_series_exact(tuple(d * v for v in r))
            scale_worst = max(scale_worst, abs(scaled - d * base) / (d * base))
    f_worst = 0.0
    for r in [(1, 1, 1), (1, 2, 3), (2, 3, 5)]:
        f_worst = max(f_worst, abs(f_series(r, 10**6).value - singular_series_exact(r)) / singular_series_exact(r))
    c = constant_C(100)
    checks = {
        "truncated_vs_product": {"max_gap_over_tails": worst_tail, "passed": worst_tail <= 1.0},
        "euler_closed_form": {"passed": euler_ok},
        "scaling": {"max_rel": scale_worst, "passed": scale_worst <= 1e-6},
        "f_equals_e": {"max_rel": f_worst, "passed": f_worst <= 1e-4},
        "c_first_factor": {"value": c.factors[0][1], "passed": c.factors[0] == (2, Fraction(39, 256))},
    }
    return _suite(checks)


def suite_oscint(seed: int) -> dict:
    from .oscint import BoxSpec, cubed_sine_tail_check, dilog_identities, mellin_crosscheck, singular_integral

    cube = singular_integral((1, 1, 1), BoxSpec.cube(4.0))
    ref = 0.12290029448 * 4.0**4
    m = mellin_crosscheck((1, 1, 1), BoxSpec.cube(2.0))
    s = cubed_sine_tail_check()
    dl = dilog_identities()
    checks = {
        "cube_integral": {"value": cube.value, "reference": ref, "passed": abs(cube.value - ref) <= 1e-8 * ref},
        "mellin": {"rel_diff": m.rel_diff, "passed": m.rel_diff <= 1e-3},
        "cubed_sine_tail": {"abs_diff": s.abs_diff, "passed": s.abs_diff <= 1e-6},
        "dilog": {"residuals": dl, "passed": max(abs(v) for v in dl.values()) <= 1e-12},
    }
    return _suite(checks)


def suite_geometry(seed: int) -> dict:
    from .geometry import ALPHA_MU_CLOSED, MU_INF_CLOSED, alpha_invariant, c_factor_matches_density, mu_infinity
    from .numtheory import primes_upto

    alpha = alpha_invariant()
    mu = mu_infinity()
    counts_ok = all(c_factor_matches_density(p) for p in primes_upto(31))
    residual = float(alpha) * MU_INF_CLOSED - ALPHA_MU_CLOSED
    checks = {
        "alpha": {"value": alpha, "passed": alpha == Fraction(1, 576)},
        "mu_infinity": {"quadrature": mu.quadrature, "passed": abs(mu.quadrature - MU_INF_CLOSED) <= 1e-6},
        "alpha_mu": {"residual": residual, "passed": abs(residual) <= 1e-12},
        "point_counts_upto_31": {"passed": counts_ok},
    }
    return _suite(checks)


def suite_points(seed: int) -> dict:
    from .points import enumerate_direct, enumerate_torsor, moebius_inversion_check, random_finite_G

    d = enumerate_direct(200, keep_points=True)
    t = enumerate_torsor(200, keep_points=True)
    rng = np.random.default_rng(seed)
    moebius_ok = all(moebius_inversion_check(random_finite_G(rng)).equal for _ in range(10))
    checks = {
        "direct_vs_torsor": {
            "direct": d.count,
            "torsor": t.count,
            "raw": t.raw_count,
            "passed": d.count == t.count and t.raw_count == 4 * t.count and d.points == t.points,
        },
        "moebius_inversion": {"instances": 10, "passed": moebius_ok},
    }
    return _suite(checks)


SUITE_FUNCS = {
    "expsums": suite_expsums,
    "localdata": suite_localdata,
    "oscint": suite_oscint,
    "geometry": suite_geometry,
    "points": suite_points,
}


def run_suite(name: str, seed: int = 0) -> dict:
    return SUITE_FUNCS[name](seed)
