"""Run every brute-force property suite and write a JSON report.

    python3 scripts/run_property_sweeps.py --instances 100 --subsets 20 --out properties.json
"""

import argparse
import json
import sys
import time

from tlrecon.properties import SUITES, run_suite


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--subsets", type=int, default=20)
    p.add_argument("--partition-trials", type=int, default=500)
    p.add_argument("--max-n", type=int, default=60)
    p.add_argument("--seeds", default="0", help="comma-separated sweep seeds")
    p.add_argument("--out", default="properties.json")
    args = p.parse_args()

    results = []
    for seed in (int(s) for s in args.seeds.split(",")):
        for name in SUITES:
            start = time.perf_counter()
            (report,) = run_suite(name, args.instances, args.subsets, seed, args.max_n, args.partition_trials)
            print(f"seed {seed} {name:7s} {'PASS' if report.ok else 'FAIL'} "
                  f"{report.instances:6d} checks {time.perf_counter() - start:6.1f}s")
            results.append({"seed": seed, **report.to_dict()})
    with open(args.out, "w") as fh:
        json.dump(results, fh, indent=1)
    return 0 if all(r["ok"] for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
