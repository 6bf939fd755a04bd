"""Command-line entry point: ``tlrecon {generate,reconstruct,bench,check}``.

Exit codes: 0 success, 1 incorrect reconstruction / property failure /
exhausted budget, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from ._bfs import warm_up
from .graph import edge_set, is_connected, load_graph, save_graph
from .oracle import BudgetExhausted, CountingOracle
from .reconstructor import ReconstructionConfig, reconstruct
from .witness import FAMILIES, generate, load_witness, save_witness, validate_decomposition

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

BENCH_COLUMNS = (
    "row", "family", "n", "seed", "distinct_pairs", "total_calls", "ratio",
    "depth", "retries", "fallbacks", "extra_batch_pairs", "correct", "wall_ms",
)

BENCH_HELP = (
    "CSV columns, in order: " + ",".join(BENCH_COLUMNS) + ". "
    "row is 'run' for one reconstruction or 'median' for the per-n summary "
    "(seed empty, numeric columns are medians, correct is the fraction of correct runs). "
    "ratio = distinct_pairs / (n * log2(n)^2)."
)


class UsageError(Exception):
    pass


@dataclass
class RunRecord:
    family: str
    n: int
    delta: int
    k: int
    seed: int
    distinct_pairs: int
    total_calls: int
    extra_batch_pairs: int
    depth: int
    retries: int
    fallbacks: int
    correct: bool
    wall_ms: float | None = None


def _config(args, seed: int) -> ReconstructionConfig:
    try:
        return ReconstructionConfig(
            k=args.k,
            delta=args.delta,
            sample_constant_override=args.sample_constant,
            base_threshold_override=args.base_threshold,
            max_retries_per_node=args.max_retries,
            rng_seed=seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def log_ratio(distinct: int, n: int) -> float:
    if n < 2:
        return float("nan")
    return distinct / (n * math.log2(n) ** 2)


# -- generate ------------------------------------------------------------------


def cmd_generate(args) -> int:
    try:
        inst = generate(args.family, args.n, args.delta, args.k, args.seed, args.q)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    save_graph(inst.graph, f"{prefix}.graph.json")
    if inst.witness is not None:
        save_witness(inst.witness, f"{prefix}.witness.json")
    with open(f"{prefix}.params.json", "w") as fh:
        json.dump(asdict(inst.params), fh)
        fh.write("\n")
    print(json.dumps({"graph": f"{prefix}.graph.json", "n": inst.graph.n, "m": inst.graph.num_edges}))
    return EXIT_OK


# -- reconstruct ---------------------------------------------------------------


def cmd_reconstruct(args) -> int:
    g = load_graph(args.graph)
    if not is_connected(g) or g.n == 0:
        raise UsageError("input graph must be nonempty and connected")
    oracle = CountingOracle(g, budget=args.budget)
    config = _config(args, args.seed)
    start = time.perf_counter()
    try:
        report = reconstruct(oracle, g.n, config)
    except BudgetExhausted as exc:
        print(json.dumps({"error": "budget_exhausted", "message": str(exc),
                          "stats": oracle.stats().to_dict()}, sort_keys=True))
        return EXIT_FAIL
    wall = (time.perf_counter() - start) * 1000
    correct = report.edges == edge_set(g)
    record = RunRecord(
        family=args.family or "input", n=g.n, delta=args.delta, k=args.k, seed=args.seed,
        distinct_pairs=report.stats.distinct_pairs, total_calls=report.stats.total_calls,
        extra_batch_pairs=report.extra_batch_pairs, depth=report.recursion_depth,
        retries=report.total_retries, fallbacks=report.fallback_count, correct=correct,
        wall_ms=round(wall, 3) if args.timing else None,
    )
    out = {"report": report.to_dict(), "run": asdict(record)}
    text = json.dumps(out, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return EXIT_OK if correct else EXIT_FAIL


# -- bench ---------------------------------------------------------------------


def bench_one(family: str, n: int, delta: int, k: int, seed: int, config: ReconstructionConfig) -> dict:
    """One generated instance, one reconstruction, one CSV row."""
    inst = generate(family, n, delta, k, seed)
    g = inst.graph
    warm_up()
    oracle = CountingOracle(g)
    start = time.perf_counter()
    report = reconstruct(oracle, g.n, config)
    wall = (time.perf_counter() - start) * 1000
    d = report.stats.distinct_pairs
    return {
        "row": "run", "family": family, "n": g.n, "seed": seed,
        "distinct_pairs": d, "total_calls": report.stats.total_calls,
        "ratio": log_ratio(d, g.n), "depth": report.recursion_depth,
        "retries": report.total_retries, "fallbacks": report.fallback_count,
        "extra_batch_pairs": report.extra_batch_pairs,
        "correct": int(report.edges == edge_set(g)), "wall_ms": round(wall, 3),
    }


def _bench_task(task):
    return bench_one(*task)


def median_rows(rows: list[dict]) -> list[dict]:
    out = []
    for n in sorted({r["n"] for r in rows}):
        group = [r for r in rows if r["n"] == n]
        summary = {"row": "median", "family": group[0]["family"], "n": n, "seed": ""}
        for col in BENCH_COLUMNS[4:]:
            summary[col] = statistics.median(r[col] for r in group)
        summary["correct"] = sum(r["correct"] for r in group) / len(group)
        out.append(summary)
    return out


def run_bench(family: str, n_list, delta: int, k: int, trials: int, seed: int,
              config_for, workers: int = 1) -> list[dict]:
    """Rows for every (n, trial) with seed ``seed + trial``, sorted by (n, seed), then medians."""
    tasks = [(family, n, delta, k, seed + t, config_for(seed + t)) for n in n_list for t in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_bench_task, tasks))
    else:
        rows = [_bench_task(t) for t in tasks]
    rows.sort(key=lambda r: (r["n"], r["seed"]))
    return rows + median_rows(rows)


def write_csv(rows: list[dict], fh) -> None:
    writer = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({c: (f"{r[c]:.6f}" if isinstance(r[c], float) else r[c]) for c in BENCH_COLUMNS})


def cmd_bench(args) -> int:
    if args.family in ("cycle", "grid"):
        raise UsageError("bench needs a family with bounded degree and witnessed treelength")
    n_list = args.n_list or ([args.n] if args.n is not None else None)
    if not n_list:
        raise UsageError("bench needs --n or --n-list")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    _config(args, args.seed)
    try:
        rows = run_bench(args.family, n_list, args.delta, args.k, args.trials, args.seed,
                         lambda s: _config(args, s), args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    return EXIT_OK if all(r["correct"] for r in rows if r["row"] == "run") else EXIT_FAIL


# -- check ---------------------------------------------------------------------


def cmd_check(args) -> int:
    from . import properties

    if args.suite != "all" and args.suite not in properties.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; expected one of {', '.join(properties.SUITES)} or all")
    if args.graph:
        g = load_graph(args.graph)
        if not args.witness:
            raise UsageError("--graph needs --witness")
        td = load_witness(args.witness)
        validation = validate_decomposition(g, td)
        if not validation.ok:
            print("FAIL witness: " + "; ".join(validation.violations))
            _write_report(args, [{"name": "witness", "ok": False, "failures": validation.violations}])
            return EXIT_FAIL
        try:
            reports = properties.check_instance(g, td, args.k, args.delta, args.subsets, args.seed)
        except ValueError as exc:
            print(f"FAIL witness: {exc}")
            _write_report(args, [{"name": "witness", "ok": False, "failures": [str(exc)]}])
            return EXIT_FAIL
        if args.suite != "all":
            reports = [r for r in reports if r.name == args.suite]
    else:
        reports = properties.run_suite(args.suite, count=args.trials, subsets=args.subsets,
                                       seed=args.seed, max_n=args.max_n)
    for r in reports:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.instances} instances, {len(r.failures)} failures")
        for label, example in r.failures:
            print(f"  {label}: {json.dumps(example, sort_keys=True)}")
    _write_report(args, [r.to_dict() for r in reports])
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL


def _write_report(args, payload) -> None:
    if args.out:
        Path(args.out).write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")


# -- parser ----------------------------------------------------------------------


def _n_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tlrecon", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, family_default="tree"):
        p.add_argument("--family", choices=FAMILIES, default=family_default)
        p.add_argument("--delta", type=int, default=3, help="maximum degree bound")
        p.add_argument("--k", type=int, default=1, help="treelength bound")
        p.add_argument("--seed", type=int, default=0)

    def algo(p):
        p.add_argument("--sample-constant", type=float, default=None,
                       help="override the sampling constant (default delta^k + 2)")
        p.add_argument("--base-threshold", type=int, default=None,
                       help="override the brute-force threshold (default max(2, floor(log2 n)))")
        p.add_argument("--max-retries", type=int, default=20, help="separator attempts per node")

    p = sub.add_parser("generate", help="write graph, witness and params JSON")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, default=None, help="second grid dimension")
    p.add_argument("--out", required=True, help="path prefix; writes PREFIX.{graph,witness,params}.json")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("reconstruct", help="reconstruct a graph file through a counting oracle")
    p.add_argument("graph", help="graph JSON file")
    common(p, family_default=None)
    algo(p)
    p.add_argument("--budget", type=int, default=None, help="cap on distinct pairs")
    p.add_argument("--out", default=None, help="also write the report JSON here")
    p.add_argument("--timing", action="store_true",
                   help="include wall time in the run record (output is then not byte-reproducible)")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("bench", help="query-count sweep over n; CSV output", description=BENCH_HELP)
    common(p)
    algo(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--n-list", type=_n_list, default=None, help="comma-separated sizes")
    p.add_argument("--trials", type=int, default=10, help="seeds per n: seed, seed+1, ...")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("check", help="run brute-force property suites")
    p.add_argument("suite", help="betweenness-bound, bag-separator, paths-near-set, ball-separator, partition or all")
    p.add_argument("--delta", type=int, default=3)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100, help="generated instances")
    p.add_argument("--subsets", type=int, default=20, help="random connected sets per instance")
    p.add_argument("--max-n", type=int, default=60)
    p.add_argument("--graph", default=None, help="check a supplied instance instead of generated ones")
    p.add_argument("--witness", default=None)
    p.add_argument("--out", default=None, help="JSON report path")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
