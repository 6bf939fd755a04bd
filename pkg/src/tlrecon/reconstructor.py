"""Randomized divide-and-conquer reconstruction from distance queries.

A node of the recursion owns a connected vertex set ``A`` together with its
boundary layers ``R^1..R^{3k}`` (``R^i`` = vertices at distance exactly ``i``
from ``A``). It samples vertex pairs of ``A`` to find a vertex ``z`` lying on
many shortest paths, takes the ball of radius ``floor(3k/2)`` around ``z`` as a
separator, splits ``A`` into components with a DSU over query answers, and
recurses on each component after recomputing its layers. Small components are
brute-forced and the pieces are glued back through the separator.

The reconstructor only ever sees a :class:`CountingOracle` and the vertex
count; it has no access to the hidden graph.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .dsu import DisjointSet
from .oracle import CountingOracle, OracleStats

log = logging.getLogger(__name__)

Edge = tuple[int, int]



@dataclass(frozen=True)
class ReconstructionConfig:
    k: int = 1
    delta: int = 3
    sample_constant_override: float | None = None
    base_threshold_override: int | None = None
    max_retries_per_node: int = 20
    rng_seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.delta < 2:
            raise ValueError("delta must be at least 2")
        if self.max_retries_per_node < 1:
            raise ValueError("max_retries_per_node must be at least 1")
        if self.sample_constant_override is not None and self.sample_constant_override <= 0:
            raise ValueError("sample constant override must be positive")
        if self.base_threshold_override is not None and self.base_threshold_override < 1:
            raise ValueError("base threshold override must be at least 1")


@dataclass
class RecursionState:
    """Vertex set ``A`` plus its exact boundary layers ``layers[i-1] = R^i``."""

    A: tuple[int, ...]
    layers: list[tuple[int, ...]]

    @classmethod
    def root(cls, n: int, k: int) -> "RecursionState":
        return cls(tuple(range(n)), [() for _ in range(3 * k)])

    @property
    def n_A(self) -> int:
        return len(self.A)

    @property
    def r(self) -> int:
        return sum(len(layer) for layer in self.layers)

    @property
    def half_radius(self) -> int:
        # floor(3k/2) with 3k layers
        return len(self.layers) // 2

    def boundary(self, upto: int | None = None) -> list[int]:
        """``R^{<=upto}`` (all layers by default), sorted."""
        upto = len(self.layers) if upto is None else upto
        return sorted(v for layer in self.layers[:upto] for v in layer)

    def within(self, upto: int | None = None) -> list[int]:
        """``A`` together with ``R^{<=upto}``, sorted."""
        return sorted(list(self.A) + self.boundary(upto))


@dataclass
class ReconstructionReport:
    edges: list[Edge]
    stats: OracleStats
    recursion_depth: int
    retries_histogram: dict[int, int]
    fallback_count: int
    extra_batch_pairs: int
    config: ReconstructionConfig

    def to_dict(self) -> dict:
        return {
            "edges": [list(e) for e in self.edges],
            "stats": self.stats.to_dict(),
            "depth": self.recursion_depth,
            "retries": {str(node): c for node, c in sorted(self.retries_histogram.items())},
            "fallbacks": self.fallback_count,
            "extra_batch_pairs": self.extra_batch_pairs,
            "config_echo": asdict(self.config),
        }

    @property
    def internal_nodes(self) -> int:
        return len(self.retries_histogram)

    @property
    def total_retries(self) -> int:
        return sum(self.retries_histogram.values())


class ReconstructionObserver:
    """Hooks for instrumented runs; the default does nothing."""

    def enter_node(self, node: int, depth: int, state: RecursionState) -> None:
        pass

    def separator_accepted(self, node: int, state: RecursionState, z: int, S: list[int], partition: list[list[int]]) -> None:
        pass

    def exit_node(self, node: int) -> None:
        pass


# -- constants -----------------------------------------------------------------


def _power(delta: int, k: int) -> int:
    if k * math.log2(delta) >= 53:
        raise OverflowError(
            f"delta^k = {delta}^{k} is too large; pass an explicit override instead"
        )
    return delta**k


def sample_constant(delta: int, k: int, override: float | None = None) -> float:
    """Constant ``C`` in the sample count; ``delta^k + 2`` unless overridden.

    Any vertex set of a treelength-k graph has a vertex of betweenness at
    least ``1 / (2 (delta^k + 1))``, so ``1 / (2p) <= delta^k + 1 < C``.
    """
    if override is not None:
        return override
    return _power(delta, k) + 2


def alpha(delta: int, k: int) -> float:
    """Balance factor ``sqrt(1 - 1/(4 (delta^k + 1)))`` accepted for separators."""
    return math.sqrt(1.0 - 1.0 / (4 * (_power(delta, k) + 1)))


def base_threshold(n0: int, config: ReconstructionConfig) -> int:
    """Components of at most this size are brute-forced: ``max(2, floor(log2 n0))``."""
    if config.base_threshold_override is not None:
        return config.base_threshold_override
    return max(2, n0.bit_length() - 1) if n0 > 0 else 2


def sample_count(C: float, size: int) -> int:
    return max(1, math.ceil(C * math.log2(size)))


# -- separator search ------------------------------------------------------------


def estimate_high_betweenness_vertex(
    oracle: CountingOracle,
    state: RecursionState,
    config: ReconstructionConfig,
    rng: np.random.Generator,
) -> int:
    """Sampled argmax of betweenness over ``D = A + R^{<=floor(3k/2)}``.

    Draws ``ceil(C log2(n_A + r))`` pairs of distinct vertices of ``A``
    (independently, with replacement), queries both endpoints against ``D``
    and counts, for every ``x`` in ``D``, the pairs with
    ``d(u, x) + d(x, v) = d(u, v)``. Ties go to the smallest id.
    """
    A = state.A
    if len(A) < 2:
        raise ValueError("betweenness sampling needs |A| >= 2")
    D = np.array(state.within(state.half_radius), dtype=np.int64)
    position = {v: i for i, v in enumerate(D.tolist())}
    C = sample_constant(config.delta, config.k, config.sample_constant_override)
    m = sample_count(C, state.n_A + state.r)

    first = rng.integers(0, len(A), size=m)
    second = rng.integers(0, len(A), size=m)
    clash = first == second
    while clash.any():
        second[clash] = rng.integers(0, len(A), size=int(clash.sum()))
        clash = first == second

    oracle.prefetch({A[i] for i in first.tolist()} | {A[j] for j in second.tolist()})
    hits = np.zeros(len(D), dtype=np.int64)
    for i, j in zip(first.tolist(), second.tolist()):
        u, v = A[i], A[j]
        du = oracle.query_batch([u], D).values[0]
        dv = oracle.query_batch([v], D).values[0]
        hits += du + dv == du[position[v]]
    return int(D[int(np.argmax(hits))])


def compute_separator(oracle: CountingOracle, state: RecursionState, z: int) -> list[int]:
    """Ball of radius ``floor(3k/2)`` around ``z``, searched inside ``A + R^{<=3k}``."""
    universe = state.within()
    row = oracle.query_batch([z], universe).values[0]
    return [v for v, d in zip(universe, row.tolist()) if d <= state.half_radius]


def partition_components(oracle: CountingOracle, state: RecursionState, S: Sequence[int]) -> list[list[int]]:
    """Components of ``G[A - S]`` recovered from distances alone.

    With ``U = S + R^1``: every vertex ``v`` of ``A - S`` joins the set ``D_b``
    of each ``b`` in ``B = (N[U] & A) - U`` with ``d(v, b) <= d(v, U)``; sets
    sharing a vertex are merged.
    """
    A = list(state.A)
    universe = set(state.within())
    S_known = {v for v in S if v in universe}
    rest = [a for a in A if a not in S_known]
    if not rest:
        return []
    U = sorted(S_known | set(state.layers[0]))
    if not U:
        # nothing to cut away: A itself is connected
        return [rest]

    to_U = oracle.query_batch(A, U).values.min(axis=1)
    B = [a for a, d in zip(A, to_U.tolist()) if d <= 1 and a not in S_known]
    rest_idx = np.array([i for i, a in enumerate(A) if a not in S_known])
    rest_arr = np.array(rest)
    dsu = DisjointSet(rest)
    if B:
        to_B = oracle.query_batch(A, B).values
        near = to_B[rest_idx] <= to_U[rest_idx, None]
        for j, b in enumerate(B):
            for v in rest_arr[near[:, j]].tolist():
                dsu.union(b, v)
    return dsu.sorted_sets()


def is_alpha_balanced(partition: Sequence[Sequence[int]], alpha_value: float, n_A: int) -> bool:
    return all(len(block) <= alpha_value * n_A for block in partition)


@dataclass
class SeparatorOutcome:
    """Result of the retry loop; ``S`` is None when every attempt failed."""

    z: int | None
    S: list[int] | None
    partition: list[list[int]] | None
    retries: int

    @property
    def found(self) -> bool:
        return self.S is not None


def find_balanced_separator(
    oracle: CountingOracle,
    state: RecursionState,
    config: ReconstructionConfig,
    rng: np.random.Generator,
    alpha_value: float | None = None,
) -> SeparatorOutcome:
    """Repeat sample/separate/partition until the split is alpha-balanced."""
    if alpha_value is None:
        alpha_value = alpha(config.delta, config.k)
    for attempt in range(config.max_retries_per_node):
        z = estimate_high_betweenness_vertex(oracle, state, config, rng)
        S = compute_separator(oracle, state, z)
        partition = partition_components(oracle, state, S)
        if is_alpha_balanced(partition, alpha_value, state.n_A):
            return SeparatorOutcome(z, S, partition, attempt)
    return SeparatorOutcome(None, None, None, config.max_retries_per_node)


# -- recursion -------------------------------------------------------------------


@dataclass
class BoundaryTables:
    """Distances issued once per node to set up every child.

    ``rows`` are the vertices of ``U = S + R^1``; ``columns`` are the vertices
    of ``A + R^{<=3k}``; ``to_A`` is the batch ``(S + R^{<=3k}) x A``.
    """

    U: list[int]
    columns: list[int]
    dist: np.ndarray
    to_A: object
    extra_pairs: int = 0


def boundary_tables(oracle: CountingOracle, state: RecursionState, S: Sequence[int]) -> BoundaryTables:
    A = list(state.A)
    R = state.boundary()
    A_set = set(A)
    S_A = [v for v in S if v in A_set]
    W = sorted(set(S_A) | set(R)) if (S_A or R) else []
    to_A = oracle.query_batch(W, A) if W else None

    universe = set(A) | set(R)
    U = sorted({v for v in S if v in universe} | set(state.layers[0]))
    if not U:
        return BoundaryTables(U, A + R, np.zeros((0, len(A) + len(R)), dtype=np.int64), to_A)

    w_index = {v: i for i, v in enumerate(to_A.sources)}
    left = to_A.values[[w_index[u] for u in U]]
    extra = 0
    if R:
        # d(s, v) with both ends outside A is not part of the (S+R) x A batch
        before = oracle.distinct_pairs
        right = oracle.query_batch(U, R).values
        extra = oracle.distinct_pairs - before
    else:
        right = np.zeros((len(U), 0), dtype=left.dtype)
    dist = np.hstack([left, right]).astype(np.int64)
    return BoundaryTables(U, A + R, dist, to_A, extra)


def child_state(
    oracle: CountingOracle,
    state: RecursionState,
    S: Sequence[int],
    component: Sequence[int],
    tables: BoundaryTables | None = None,
) -> RecursionState:
    """Layers of a component via ``d(C, v) = min_{s in S+R^1} d(C, s) + d(s, v)``."""
    if tables is None:
        tables = boundary_tables(oracle, state, S)
    comp = sorted(component)
    assert len(comp) < state.n_A, "a component cannot be all of A"
    col = {v: j for j, v in enumerate(tables.columns)}
    comp_cols = [col[v] for v in comp]
    to_comp = tables.dist[:, comp_cols].min(axis=1)
    via = (to_comp[:, None] + tables.dist).min(axis=0)
    via[comp_cols] = 0
    layers: list[list[int]] = [[] for _ in state.layers]
    for v, d in zip(tables.columns, via.tolist()):
        if 1 <= d <= len(layers):
            layers[d - 1].append(v)
    return RecursionState(tuple(comp), [tuple(sorted(layer)) for layer in layers])


def brute_force_component(oracle: CountingOracle, component: Sequence[int]) -> list[Edge]:
    comp = sorted(component)
    table = oracle.query_batch(comp, comp).values
    us, vs = np.nonzero(np.triu(table == 1, k=1))
    return [(comp[i], comp[j]) for i, j in zip(us.tolist(), vs.tolist())]


def glue(state: RecursionState, S: Sequence[int], child_edges: Sequence[Sequence[Edge]], to_A) -> list[Edge]:
    """Child edges plus every separator-to-``A`` pair at distance 1."""
    edges = {e for part in child_edges for e in part}
    A_set = set(state.A)
    if to_A is not None:
        cols = to_A.targets
        for s in S:
            if s not in A_set:
                continue
            row = to_A.row(s)
            for j in np.flatnonzero(row == 1).tolist():
                a = cols[j]
                edges.add((min(s, a), max(s, a)))
    return sorted(edges)


class _Run:
    def __init__(self, oracle, config, threshold, observer):
        self.oracle = oracle
        self.config = config
        self.threshold = threshold
        self.observer = observer or ReconstructionObserver()
        self.rng = np.random.default_rng(config.rng_seed)
        self.alpha = alpha(config.delta, config.k)
        self.size_bound = _power(config.delta, 3 * config.k // 2) + 1
        self.next_node = 0
        self.max_depth = 0
        self.retries: dict[int, int] = {}
        self.fallbacks = 0
        self.extra_pairs = 0

    def leaf(self, component, depth) -> list[Edge]:
        self.max_depth = max(self.max_depth, depth)
        self.oracle.depth = depth
        return brute_force_component(self.oracle, component)

    def solve(self, state: RecursionState, depth: int) -> list[Edge]:
        node = self.next_node
        self.next_node += 1
        self.max_depth = max(self.max_depth, depth)
        self.oracle.depth = depth
        self.observer.enter_node(node, depth, state)

        outcome = find_balanced_separator(self.oracle, state, self.config, self.rng, self.alpha)
        self.retries[node] = outcome.retries
        if not outcome.found:
            log.warning("node %d: no balanced separator after %d attempts; brute-forcing %d vertices",
                        node, outcome.retries, state.n_A)
            self.fallbacks += 1
            edges = brute_force_component(self.oracle, state.A)
            self.observer.exit_node(node)
            return edges

        S, partition = outcome.S, outcome.partition
        if len(S) > self.size_bound:
            log.warning("node %d: separator of size %d exceeds %d; degree or treelength promise broken",
                        node, len(S), self.size_bound)
        self.observer.separator_accepted(node, state, outcome.z, S, partition)

        tables = boundary_tables(self.oracle, state, S)
        self.extra_pairs += tables.extra_pairs
        child_edges = []
        for comp in partition:
            if len(comp) <= self.threshold:
                child_edges.append(self.leaf(comp, depth + 1))
            else:
                child = child_state(self.oracle, state, S, comp, tables)
                child_edges.append(self.solve(child, depth + 1))
            self.oracle.depth = depth
        edges = glue(state, S, child_edges, tables.to_A)
        self.observer.exit_node(node)
        return edges


def reconstruct(
    oracle: CountingOracle,
    n: int,
    config: ReconstructionConfig,
    observer: ReconstructionObserver | None = None,
) -> ReconstructionReport:
    """Recover the edge set of the oracle's hidden graph on vertices ``0..n-1``."""
    if n < 1:
        raise ValueError("need at least one vertex")
    threshold = base_threshold(n, config)
    run = _Run(oracle, config, threshold, observer)
    if n <= threshold:
        edges = run.leaf(range(n), 0)
    else:
        edges = run.solve(RecursionState.root(n, config.k), 0)
    oracle.depth = 0
    return ReconstructionReport(
        edges=edges,
        stats=oracle.stats(),
        recursion_depth=run.max_depth,
        retries_histogram=run.retries,
        fallback_count=run.fallbacks,
        extra_batch_pairs=run.extra_pairs,
        config=config,
    )
