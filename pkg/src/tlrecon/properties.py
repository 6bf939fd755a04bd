"""Brute-force checkers for the structural facts the reconstruction relies on.

Everything here works on the true graph with exact integer or rational
arithmetic, independently of the oracle's answer path (the one exception,
``check_partition``, compares the oracle-driven partition against a direct
component search). Intended for instances of up to a few dozen vertices.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .graph import Graph, connected_components, distance_matrix, is_connected
from .oracle import CountingOracle
from .reconstructor import RecursionState, partition_components
from .witness import (
    GeneratedInstance,
    TreeDecomposition,
    bag_half_separator,
    decomposition_length,
    gen_bounded_treelength,
    gen_chordal,
    gen_random_tree,
    validate_decomposition,
)


@dataclass
class PropertyReport:
    name: str
    instances: int = 0
    failures: list[tuple[str, dict]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def merge(self, other: "PropertyReport") -> "PropertyReport":
        self.instances += other.instances
        self.failures.extend(other.failures)
        return self

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "instances": self.instances,
            "ok": self.ok,
            "failures": [{"instance": d, "counterexample": c} for d, c in self.failures],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# -- betweenness -----------------------------------------------------------------


def _pair_mask(size: int) -> np.ndarray:
    return np.triu(np.ones((size, size), dtype=bool), k=1)


def betweenness_counts(dist: np.ndarray, A: Sequence[int], candidates: Sequence[int]) -> np.ndarray:
    """For each candidate ``v``: number of 2-subsets ``{a, b}`` of ``A`` with ``v`` on a shortest a-b path."""
    A = np.asarray(A)
    cand = np.asarray(candidates)
    dAA = dist[np.ix_(A, A)]
    dvA = dist[np.ix_(cand, A)]
    on_path = dvA[:, :, None] + dvA[:, None, :] == dAA[None, :, :]
    return (on_path & _pair_mask(len(A))[None]).sum(axis=(1, 2))


def exact_betweenness(g: Graph, A: Iterable[int], v: int, dist: np.ndarray | None = None) -> Fraction:
    """Fraction of 2-subsets of ``A`` having ``v`` on some shortest path (endpoints included)."""
    A = sorted(set(A))
    if len(A) < 2:
        raise ValueError("betweenness needs |A| >= 2")
    if dist is None:
        dist = distance_matrix(g)
    count = int(betweenness_counts(dist, A, [v])[0])
    return Fraction(count, comb(len(A), 2))


def betweenness_bound(delta: int, k: int) -> Fraction:
    return Fraction(1, 2 * (delta**k + 1))


def within_alpha(size: int, n_A: int, delta: int, k: int) -> bool:
    """Exact test of ``size <= alpha * n_A`` with ``alpha^2 = 1 - 1/(4(delta^k+1))``."""
    q = 4 * (delta**k + 1)
    return size * size * q <= (q - 1) * n_A * n_A


def _ball(dist: np.ndarray, centers: Sequence[int], radius: int) -> np.ndarray:
    return np.flatnonzero(dist[np.asarray(centers)].min(axis=0) <= radius)


def _describe(g: Graph, label: str | None) -> str:
    return label or f"graph(n={g.n}, m={g.num_edges})"


# -- individual checks -----------------------------------------------------------


def _require_witness(g: Graph, witness: TreeDecomposition, k: int) -> None:
    report = validate_decomposition(g, witness)
    if not report.ok:
        raise ValueError(f"invalid witness: {report.violations[0]}")
    length = decomposition_length(g, witness)
    if length > k:
        raise ValueError(f"witness has length {length} > k={k}")


def check_betweenness_bound(g: Graph, witness: TreeDecomposition, k: int, delta: int, *, label: str | None = None,
                 dist: np.ndarray | None = None) -> PropertyReport:
    """With ``A = V``: some vertex has betweenness at least ``1 / (2 (delta^k + 1))``."""
    _require_witness(g, witness, k)
    report = PropertyReport("betweenness-bound", instances=1)
    if g.n < 2:
        return report
    if dist is None:
        dist = distance_matrix(g)
    V = list(range(g.n))
    counts = betweenness_counts(dist, V, V)
    best = Fraction(int(counts.max()), comb(g.n, 2))
    bound = betweenness_bound(delta, k)
    if best < bound:
        report.failures.append((_describe(g, label), {
            "max_betweenness": str(best), "bound": str(bound), "argmax": int(counts.argmax())}))
    return report


def check_paths_near_set(g: Graph, k: int, A: Iterable[int], *, label: str | None = None,
                 dist: np.ndarray | None = None) -> PropertyReport:
    """No vertex farther than ``floor(3k/2)`` from ``A`` lies on a shortest path inside ``A``.

    Checked as: ``d(a, z) + d(z, b) > d(a, b)`` for all such ``z`` and all ``a, b`` in ``A``.
    """
    A = sorted(set(A))
    if not A or len(connected_components(g, A)) != 1:
        raise ValueError("A must induce a nonempty connected subgraph")
    if dist is None:
        dist = distance_matrix(g)
    report = PropertyReport("paths-near-set", instances=1)
    radius = 3 * k // 2
    idx = np.asarray(A)
    to_A = dist[idx].min(axis=0)
    dAA = dist[np.ix_(idx, idx)]
    for z in np.flatnonzero(to_A > radius).tolist():
        dz = dist[z, idx]
        bad = dz[:, None] + dz[None, :] <= dAA
        if bad.any():
            i, j = np.argwhere(bad)[0]
            report.failures.append((_describe(g, label), {
                "A": A, "a": A[i], "b": A[j], "z": z, "k": k}))
            break
    return report


def check_ball_separator(g: Graph, witness: TreeDecomposition, k: int, delta: int, A: Iterable[int], *,
                 label: str | None = None, dist: np.ndarray | None = None) -> PropertyReport:
    """Every ``z`` near ``A`` with betweenness >= p/2 yields an alpha-balanced ball separator.

    ``p`` is the largest betweenness over ``N^{<=k}[A]``; candidates ``z``
    range over ``N^{<=floor(3k/2)}[A]``; the separator is the ball of radius
    ``floor(3k/2)`` around ``z``.
    """
    _require_witness(g, witness, k)
    A = sorted(set(A))
    if len(A) < 2 or len(connected_components(g, A)) != 1:
        raise ValueError("A must induce a connected subgraph with at least 2 vertices")
    if dist is None:
        dist = distance_matrix(g)
    report = PropertyReport("ball-separator", instances=1)
    radius = 3 * k // 2
    near_k = _ball(dist, A, k)
    domain = _ball(dist, A, radius)
    counts = betweenness_counts(dist, A, domain)
    by_vertex = dict(zip(domain.tolist(), counts.tolist()))
    p_count = max(by_vertex[v] for v in near_k.tolist())
    A_set = set(A)
    for z, c in by_vertex.items():
        if 2 * c < p_count:
            continue
        S = set(_ball(dist, [z], radius).tolist())
        blocks = connected_components(g, A_set - S)
        worst = max((len(b) for b in blocks), default=0)
        if not within_alpha(worst, len(A), delta, k):
            report.failures.append((_describe(g, label), {
                "A": A, "z": z, "betweenness": str(Fraction(c, comb(len(A), 2))),
                "p": str(Fraction(p_count, comb(len(A), 2))), "largest_component": worst}))
    return report


def separator_balanced_check(g: Graph, A: Iterable[int], S: Iterable[int], beta) -> bool:
    """Whether every component of ``g[A - S]`` has at most ``beta * |A|`` vertices."""
    A = set(A)
    limit = Fraction(beta) * len(A)
    return all(len(b) <= limit for b in connected_components(g, A - set(S)))


def check_bag_separator(g: Graph, witness: TreeDecomposition, A: Iterable[int], *, label: str | None = None) -> PropertyReport:
    """Some bag of the witness is a 1/2-balanced separator of ``A``."""
    A = sorted(set(A))
    report = PropertyReport("bag-separator", instances=1)
    try:
        t = bag_half_separator(g, witness, A)
    except RuntimeError as exc:
        report.failures.append((_describe(g, label), {"A": A, "error": str(exc)}))
        return report
    if not separator_balanced_check(g, A, witness.bags[t], Fraction(1, 2)):
        report.failures.append((_describe(g, label), {"A": A, "node": t, "bag": sorted(witness.bags[t])}))
    return report


def exact_state(g: Graph, A: Iterable[int], k: int) -> RecursionState:
    """Recursion state for ``A`` with layers computed by BFS on the true graph."""
    A = sorted(set(A))
    from .graph import multi_source_distances

    dist = multi_source_distances(g, A, 3 * k)
    layers: list[list[int]] = [[] for _ in range(3 * k)]
    for v, d in dist.items():
        if d >= 1:
            layers[d - 1].append(v)
    return RecursionState(tuple(A), [tuple(sorted(layer)) for layer in layers])


def check_partition(g: Graph, A: Iterable[int], S: Iterable[int], k: int, *, label: str | None = None) -> PropertyReport:
    """Oracle-driven component partition of ``A - S`` equals the true components."""
    state = exact_state(g, A, k)
    S = sorted(set(S))
    got = partition_components(CountingOracle(g), state, S)
    want = connected_components(g, set(state.A) - set(S))
    report = PropertyReport("partition", instances=1)
    if got != want:
        report.failures.append((_describe(g, label), {
            "A": list(state.A), "S": S, "got": got, "want": want}))
    return report


# -- sweeps ----------------------------------------------------------------------


def random_connected_subset(g: Graph, rng: random.Random, size: int | None = None) -> list[int]:
    """Grow a connected vertex set from a random start by random frontier picks."""
    if size is None:
        size = rng.randint(1, g.n)
    start = rng.randrange(g.n)
    chosen = {start}
    frontier = set(g.neighbors(start))
    while len(chosen) < size and frontier:
        v = rng.choice(sorted(frontier))
        chosen.add(v)
        frontier.discard(v)
        frontier.update(w for w in g.neighbors(v) if w not in chosen)
    return sorted(chosen)


def sweep_instances(count: int = 100, seed: int = 0, max_n: int = 60) -> list[GeneratedInstance]:
    """Witnessed instances mixing trees, chordal graphs and treelength-2/3 graphs."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(2, max_n)
        s = rng.randrange(2**31)
        kind = i % 4
        if kind == 0:
            out.append(gen_random_tree(n, rng.randint(2, 4), s))
        elif kind == 1:
            out.append(gen_chordal(n, rng.randint(2, 6), s))
        else:
            out.append(gen_bounded_treelength(n, rng.randint(2, 4), kind, s))
    return out


def _label(inst: GeneratedInstance) -> str:
    p = inst.params
    return f"{p.family}(n={p.n}, delta={p.delta}, k={p.k}, seed={p.seed})"


def sweep_betweenness_bound(instances: Sequence[GeneratedInstance]) -> PropertyReport:
    report = PropertyReport("betweenness-bound")
    for inst in instances:
        p = inst.params
        report.merge(check_betweenness_bound(inst.graph, inst.witness, p.k, p.delta, label=_label(inst)))
    return report


def sweep_subsets(instances: Sequence[GeneratedInstance], subsets: int = 20, seed: int = 0,
                  which: Sequence[str] = ("bag-separator", "paths-near-set", "ball-separator")) -> dict[str, PropertyReport]:
    """Run the per-subset checks on ``subsets`` random connected sets per instance."""
    reports = {name: PropertyReport(name) for name in which}
    rng = random.Random(seed)
    for inst in instances:
        g, td, p = inst.graph, inst.witness, inst.params
        dist = distance_matrix(g)
        label = _label(inst)
        for _ in range(subsets):
            A = random_connected_subset(g, rng)
            if "bag-separator" in reports:
                reports["bag-separator"].merge(check_bag_separator(g, td, A, label=label))
            if "paths-near-set" in reports:
                reports["paths-near-set"].merge(check_paths_near_set(g, p.k, A, label=label, dist=dist))
            if "ball-separator" in reports and len(A) >= 2:
                reports["ball-separator"].merge(check_ball_separator(g, td, p.k, p.delta, A, label=label, dist=dist))
    return reports


def sweep_partition(trials: int = 500, seed: int = 0, max_n: int = 60) -> PropertyReport:
    """Random (graph, connected A, separator) triples, half ball-shaped and half arbitrary."""
    rng = random.Random(seed)
    report = PropertyReport("partition")
    instances = sweep_instances(max(1, trials // 5), seed=rng.randrange(2**31), max_n=max_n)
    for t in range(trials):
        inst = instances[t % len(instances)]
        g, k = inst.graph, inst.params.k
        if g.n < 2:
            report.instances += 1
            continue
        A = random_connected_subset(g, rng)
        universe = sorted(set(exact_state(g, A, k).within()))
        if t % 2 == 0:
            z = rng.choice(universe)
            from .graph import neighborhood_closed

            S = sorted(neighborhood_closed(g, [z], 3 * k // 2) & set(universe))
        else:
            S = sorted(rng.sample(universe, rng.randint(1, max(1, len(universe) // 3))))
        report.merge(check_partition(g, A, S, k, label=_label(inst)))
    return report


SUITES = ("betweenness-bound", "bag-separator", "paths-near-set", "ball-separator", "partition")


def run_suite(name: str, count: int = 100, subsets: int = 20, seed: int = 0, max_n: int = 60,
              partition_trials: int = 500) -> list[PropertyReport]:
    """Run one named suite (or ``"all"``) on the standard instance mix."""
    names = SUITES if name == "all" else (name,)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite {unknown[0]!r}; expected one of {', '.join(SUITES)} or 'all'")
    instances = sweep_instances(count, seed, max_n)
    out = []
    if "betweenness-bound" in names:
        out.append(sweep_betweenness_bound(instances))
    per_subset = [s for s in names if s in ("bag-separator", "paths-near-set", "ball-separator")]
    if per_subset:
        reports = sweep_subsets(instances, subsets, seed, per_subset)
        out.extend(reports[s] for s in per_subset)
    if "partition" in names:
        out.append(sweep_partition(partition_trials, seed, max_n))
    return out


def check_instance(g: Graph, witness: TreeDecomposition, k: int, delta: int, subsets: int = 20,
                   seed: int = 0) -> list[PropertyReport]:
    """All witness-based checks on a single supplied instance."""
    if not is_connected(g):
        raise ValueError("graph must be connected")
    inst = GeneratedInstance(g, witness, _params_for(g, k, delta))
    out = [check_betweenness_bound(g, witness, k, delta, label="input")]
    reports = sweep_subsets([inst], subsets, seed)
    out.extend(reports.values())
    return out


def _params_for(g: Graph, k: int, delta: int):
    from .witness import InstanceParams

    return InstanceParams("input", g.n, delta, k, 0)
