#!/usr/bin/env python3
"""Scan the coercivity margin over n and cross-check against a point cloud.

The margin is the closed-form constant left on the coercive term after the
optimal splitting; positive means the functional inequality machinery closes
at that dimension.  The cloud check reruns the underlying pointwise bounds
so a sign flip here would be visible immediately.
"""

import argparse

from hgauge.group import GroupParams
from hgauge.inequalities import (
    alpha_opt,
    check_gradient_bounds,
    coercivity_margin,
    split_objective,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=20)
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cloud", action="store_true", help="also verify pointwise bounds")
    args = ap.parse_args()

    print(f"{'n':>3} {'margin':>12} {'alpha*':>10} {'objective':>12}")
    for n in range(2, args.n_max + 1):
        a = alpha_opt(n)
        print(f"{n:>3} {coercivity_margin(n):>12.6f} {a:>10.6f} {split_objective(a, n):>12.3e}")

    if args.cloud:
        print()
        for n in (2, 6, 10):
            reports = check_gradient_bounds(GroupParams(n), args.points, args.seed)
            worst = min(r.min_margin for r in reports)
            status = "ok" if all(r.passed for r in reports) else "VIOLATED"
            print(f"n={n}: min cloud margin {worst:.3e} over {args.points} pts [{status}]")


if __name__ == "__main__":
    main()
