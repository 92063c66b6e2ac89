"""Print N(B) / (B log^4 B) next to the predicted leading coefficient."""

from __future__ import annotations

import argparse
import math

from manin_threefold.geometry import ALPHA_MU_CLOSED
from manin_threefold.localdata import constant_C
from manin_threefold.points import enumerate_direct


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-bound", type=int, default=2000)
    ap.add_argument("--steps", type=int, default=8)
    args = ap.parse_args()
    bounds = sorted({max(3, round(args.max_bound * 2 ** (k - args.steps + 1))) for k in range(args.steps)})
    res = enumerate_direct(bounds[-1], keep_points=True)
    counts = res.counts_upto(bounds)
    coeff = ALPHA_MU_CLOSED * constant_C(10**6, keep_factors=False).value
    print(f"predicted coefficient {coeff:.10g}")
    print(f"{'B':>8} {'N(B)':>10} {'N/(B log^4 B)':>16}")
    for B in bounds:
        print(f"{B:>8} {counts[B]:>10} {counts[B] / (B * math.log(B) ** 4):>16.8g}")


if __name__ == "__main__":
    main()
