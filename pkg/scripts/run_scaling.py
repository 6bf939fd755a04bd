"""Distinct-pair scaling on random trees; writes the bench CSV and prints medians.

    python3 scripts/run_scaling.py --n-list 250,500,1000,2000,4000 --trials 10 --out scaling.csv
"""

import argparse
import math
import sys

from tlrecon.cli import run_bench, write_csv
from tlrecon.reconstructor import ReconstructionConfig


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--family", default="tree")
    p.add_argument("--n-list", default="250,500,1000,2000,4000")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--delta", type=int, default=3)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-constant", type=float, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="scaling.csv")
    args = p.parse_args()

    sizes = [int(x) for x in args.n_list.split(",")]
    rows = run_bench(
        args.family, sizes, args.delta, args.k, args.trials, args.seed,
        lambda s: ReconstructionConfig(k=args.k, delta=args.delta, rng_seed=s,
                                       sample_constant_override=args.sample_constant),
        args.workers,
    )
    with open(args.out, "w", newline="") as fh:
        write_csv(rows, fh)

    medians = [r for r in rows if r["row"] == "median"]
    base = medians[0]["ratio"]
    print(f"{'n':>6} {'distinct':>10} {'ratio':>7} {'vs first':>8} {'of n(n-1)/2':>11}")
    for r in medians:
        n = r["n"]
        share = r["distinct_pairs"] / (n * (n - 1) / 2)
        print(f"{n:>6} {r['distinct_pairs']:>10.0f} {r['ratio']:>7.3f} {r['ratio'] / base:>8.3f} {share:>11.3f}")
    worst = {}
    for r in rows:
        if r["row"] == "run":
            worst[r["n"]] = max(worst.get(r["n"], 0), r["distinct_pairs"])
    for n, d in sorted(worst.items()):
        if d >= n * (n - 1) / 4:
            print(f"n={n}: max distinct_pairs {d} reaches n(n-1)/4", file=sys.stderr)
    return 0 if all(r["correct"] == 1 for r in medians) else 1


if __name__ == "__main__":
    sys.exit(main())
