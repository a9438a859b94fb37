#!/usr/bin/env python3
"""Empirical Poincare ratios across seeds for one measure family.

Runs independent chains and prints the per-function ratio spread; the
worst-case ratio over the test family is the quantity the coercivity
constants have to dominate.
"""

import argparse

from hgauge.coercive import default_family, poincare_ratio
from hgauge.group import GroupParams
from hgauge.measures import MeasureSpec, SamplerConfig, run_chain


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", default="power")
    ap.add_argument("--k", type=float, default=4.0)
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--q", type=float, default=2.0)
    ap.add_argument("--steps", type=int, default=110_000)
    ap.add_argument("--burn", type=int, default=10_000)
    ap.add_argument("--seeds", type=int, nargs="+", default=[101, 102, 103])
    args = ap.parse_args()

    spec = MeasureSpec(family=args.family, k=args.k, q=args.q)
    params = GroupParams(args.n)
    fam = default_family(params)[1:]  # constants have no gradient

    table = {f.name: [] for f in fam}
    for seed in args.seeds:
        cfg = SamplerConfig(n_steps=args.steps, burn_in=args.burn, seed=seed)
        batch = run_chain(spec, params, cfg, 0)
        for f in fam:
            ratio, se = poincare_ratio(f, spec, batch)
            table[f.name].append((ratio, se))

    print(f"measure {spec.label()}, q={args.q}, n={args.n}, seeds {args.seeds}")
    print(f"{'function':<24} " + " ".join(f"{s:>16}" for s in args.seeds))
    for name, rows in table.items():
        cells = " ".join(f"{r:>9.4f}+-{se:<5.3f}" for r, se in rows)
        print(f"{name:<24} {cells}")
    worst = max(max(r for r, _ in rows) for rows in table.values())
    print(f"worst ratio: {worst:.4f}")


if __name__ == "__main__":
    main()
