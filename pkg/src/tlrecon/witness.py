"""Tree decompositions, their length, and generators of witnessed instances.

Each generator returns the graph together with a tree decomposition whose
length certifies an upper bound on the treelength. Exact treelength is
only computed by brute force on tiny graphs.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .graph import (
    Graph,
    connected_components,
    distance_matrix,
    graph_from_dict,
    graph_to_dict,
    is_connected,
)


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset[int], ...]
    tree_edges: tuple[tuple[int, int], ...] = ()

    @classmethod
    def build(cls, bags, tree_edges=()) -> "TreeDecomposition":
        return cls(
            tuple(frozenset(b) for b in bags),
            tuple((int(s), int(t)) for s, t in tree_edges),
        )

    @property
    def num_nodes(self) -> int:
        return len(self.bags)

    def tree_adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.bags]
        for s, t in self.tree_edges:
            adj[s].append(t)
            adj[t].append(s)
        return adj

    def to_dict(self) -> dict:
        return {
            "nodes": self.num_nodes,
            "tree_edges": [[s, t] for s, t in self.tree_edges],
            "bags": [sorted(b) for b in self.bags],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TreeDecomposition":
        try:
            nodes = int(data["nodes"])
            bags = data["bags"]
            tree_edges = data["tree_edges"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed witness object: {exc}") from None
        if len(bags) != nodes:
            raise ValueError(f"witness declares {nodes} nodes but lists {len(bags)} bags")
        return cls.build(bags, tree_edges)


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_decomposition(g: Graph, td: TreeDecomposition) -> ValidationReport:
    """Check the tree, vertex coverage, subtree connectivity and edge coverage."""
    report = ValidationReport()
    out = report.violations
    nodes = td.num_nodes
    if nodes == 0:
        if g.n:
            out.append("decomposition has no nodes")
        return report

    for s, t in td.tree_edges:
        if not (0 <= s < nodes and 0 <= t < nodes) or s == t:
            out.append(f"tree edge ({s}, {t}) is invalid")
    if out:
        return report
    if len(td.tree_edges) != nodes - 1:
        out.append(f"tree has {len(td.tree_edges)} edges for {nodes} nodes")
    adj = td.tree_adjacency()
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    if len(seen) != nodes:
        out.append(f"tree is disconnected: node {min(set(range(nodes)) - seen)} unreachable from 0")

    holders: list[list[int]] = [[] for _ in range(g.n)]
    for t, bag in enumerate(td.bags):
        for v in bag:
            if not 0 <= v < g.n:
                out.append(f"bag {t} contains invalid vertex {v}")
            else:
                holders[v].append(t)

    for v in range(g.n):
        if not holders[v]:
            out.append(f"vertex {v} is in no bag")
            continue
        mine = set(holders[v])
        reach = {holders[v][0]}
        queue = deque(reach)
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w in mine and w not in reach:
                    reach.add(w)
                    queue.append(w)
        if len(reach) != len(mine):
            out.append(f"bags containing vertex {v} do not induce a subtree: {sorted(mine)}")

    for u in range(g.n):
        for v in g.neighbors(u):
            if u < v and not any(v in td.bags[t] for t in holders[u]):
                out.append(f"edge ({u}, {v}) is in no bag")
    return report


def decomposition_length(g: Graph, td: TreeDecomposition) -> int:
    """Largest whole-graph distance between two vertices sharing a bag."""
    report = validate_decomposition(g, td)
    if not report.ok:
        raise ValueError(f"invalid decomposition: {report.violations[0]}")
    if not is_connected(g):
        raise ValueError("decomposition length needs a connected graph")
    mates: list[set[int]] = [set() for _ in range(g.n)]
    for bag in td.bags:
        for v in bag:
            mates[v].update(bag)
    best = 0
    for v in range(g.n):
        want = mates[v] - {v}
        if not want:
            continue
        # truncated BFS: stop once every bag-mate has been reached
        dist = {v: 0}
        queue = deque([v])
        found = 0
        while queue and found < len(want):
            u = queue.popleft()
            for w in g.neighbors(u):
                if w not in dist:
                    dist[w] = dist[u] + 1
                    if w in want:
                        found += 1
                        best = max(best, dist[w])
                    queue.append(w)
    return best


def bag_half_separator(g: Graph, td: TreeDecomposition, A) -> int:
    """Index of a node whose bag leaves only components of size <= |A|/2 in g[A - bag]."""
    A = set(A)
    for t, bag in enumerate(td.bags):
        blocks = connected_components(g, A - bag)
        if all(2 * len(b) <= len(A) for b in blocks):
            return t
    raise RuntimeError("no bag is a 1/2-balanced separator; the decomposition must be invalid")


def exact_treelength(g: Graph, max_n: int = 12) -> int:
    """Exact treelength by exhaustive search over elimination orderings.

    Every tree decomposition can be refined into the clique tree of a chordal
    supergraph, and every such supergraph comes from an elimination ordering,
    so the minimum over orderings of the largest ``d_G`` across fill edges is
    exact. Subset DP keeps this at ``O(2^n n^2)``.
    """
    n = g.n
    if n > max_n:
        raise ValueError(f"exact treelength is limited to n <= {max_n}")
    if not is_connected(g):
        raise ValueError("treelength needs a connected graph")
    if n <= 1:
        return 0
    dist = distance_matrix(g)
    full = (1 << n) - 1

    def cost(v: int, eliminated: int) -> int:
        # vertices outside eliminated+v reachable from v through eliminated ones
        worst = 0
        seen = 1 << v
        stack = [v]
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                bit = 1 << w
                if seen & bit:
                    continue
                seen |= bit
                if eliminated & bit:
                    stack.append(w)
                else:
                    worst = max(worst, int(dist[v, w]))
        return worst

    best = [0] * (1 << n)
    for mask in range(1, full + 1):
        value = None
        m = mask
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            rest = mask ^ low
            c = max(best[rest], cost(v, rest))
            if value is None or c < value:
                value = c
        best[mask] = value
    return best[full]


# -- generators ---------------------------------------------------------------


@dataclass(frozen=True)
class InstanceParams:
    family: str
    n: int
    delta: int
    k: int
    seed: int


@dataclass
class GeneratedInstance:
    graph: Graph
    witness: TreeDecomposition | None
    params: InstanceParams

    def to_dict(self) -> dict:
        return {
            "graph": graph_to_dict(self.graph),
            "witness": self.witness.to_dict() if self.witness is not None else None,
            "params": asdict(self.params),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratedInstance":
        witness = data.get("witness")
        return cls(
            graph_from_dict(data["graph"]),
            TreeDecomposition.from_dict(witness) if witness is not None else None,
            InstanceParams(**data["params"]),
        )


def gen_random_tree(n: int, delta: int, seed: int) -> GeneratedInstance:
    """Random tree: each new vertex hangs off a uniform vertex with spare degree.

    The witness has one bag per edge, so its length is 1.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if delta < 2:
        raise ValueError("delta must be at least 2")
    rng = random.Random(seed)
    parent = [-1] * n
    degree = [0] * n
    open_ = [0]
    for v in range(1, n):
        i = rng.randrange(len(open_))
        p = open_[i]
        parent[v] = p
        degree[p] += 1
        degree[v] = 1
        if degree[p] == delta:
            open_[i] = open_[-1]
            open_.pop()
        open_.append(v)
    edges = [(parent[v], v) for v in range(1, n)]
    params = InstanceParams("tree", n, delta, 1, seed)
    if n == 1:
        return GeneratedInstance(Graph(1), TreeDecomposition.build([{0}]), params)

    # node v-1 holds the edge {parent[v], v}
    bags = [{parent[v], v} for v in range(1, n)]
    tree_edges = []
    first_root_child = None
    for v in range(1, n):
        p = parent[v]
        if p != 0:
            tree_edges.append((p - 1, v - 1))
        elif first_root_child is None:
            first_root_child = v
        else:
            tree_edges.append((first_root_child - 1, v - 1))
    return GeneratedInstance(Graph(n, edges), TreeDecomposition.build(bags, tree_edges), params)


class _Builder:
    """Shared bookkeeping for bag-tree generators."""

    def __init__(self, n: int, delta: int, rng: random.Random):
        self.n = n
        self.delta = delta
        self.rng = rng
        self.adj: list[set[int]] = [set() for _ in range(n)]
        self.bags: list[list[int]] = []
        self.tree_edges: list[tuple[int, int]] = []
        self.holders: list[list[int]] = [[] for _ in range(n)]
        self.placed = 0
        self.unsaturated: set[int] = set()

    @property
    def remaining(self) -> int:
        return self.n - self.placed

    def residual(self, v: int) -> int:
        return self.delta - len(self.adj[v])

    def keeps_room(self, degree_after: dict[int, int], new_count: int) -> bool:
        """Whether some vertex keeps spare degree while vertices remain to place."""
        if self.remaining - new_count == 0:
            return True
        for v, d in degree_after.items():
            if d < self.delta:
                return True
        return any(v not in degree_after for v in self.unsaturated)

    def commit(self, parent_bag: int | None, old: list[int], new_count: int, edges) -> None:
        new = list(range(self.placed, self.placed + new_count))
        self.placed += new_count
        for v in new:
            self.unsaturated.add(v)
        for u, v in edges:
            self.adj[u].add(v)
            self.adj[v].add(u)
        bag = sorted(old + new)
        t = len(self.bags)
        self.bags.append(bag)
        for v in bag:
            self.holders[v].append(t)
            if len(self.adj[v]) >= self.delta:
                self.unsaturated.discard(v)
        if parent_bag is not None:
            self.tree_edges.append((parent_bag, t))

    def fallback(self) -> None:
        """Hang one new vertex off any vertex with spare degree."""
        v = min(self.unsaturated)
        self.commit(self.holders[v][0], [v], 1, [(v, self.placed)])

    def finish(self, family: str, k: int, seed: int) -> GeneratedInstance:
        edges = [(u, v) for u in range(self.n) for v in sorted(self.adj[u]) if u < v]
        g = Graph(self.n, edges)
        td = TreeDecomposition.build(self.bags, self.tree_edges)
        return GeneratedInstance(g, td, InstanceParams(family, self.n, self.delta, k, seed))


_ATTEMPTS = 24


def _clique_tree(n: int, delta: int, seed: int, cap: int, family: str, k: int) -> GeneratedInstance:
    rng = random.Random(seed)
    b = _Builder(n, delta, rng)
    size = rng.randint(1, min(cap, n))
    if size < n:
        size = min(size, delta)  # leave spare degree for later vertices
    b.commit(None, [], size, [(u, v) for u in range(size) for v in range(u + 1, size)])
    while b.remaining:
        for _ in range(_ATTEMPTS):
            t = rng.randrange(len(b.bags))
            bag = b.bags[t]
            x = rng.randint(1, min(cap - 1, b.remaining))
            eligible = [v for v in bag if b.residual(v) >= x]
            if not eligible:
                continue
            o = rng.randint(1, min(len(eligible), cap - x))
            old = sorted(rng.sample(eligible, o))
            new = list(range(b.placed, b.placed + x))
            degree_after = {v: len(b.adj[v]) + x for v in old}
            degree_after.update({v: o + x - 1 for v in new})
            if not b.keeps_room(degree_after, x):
                continue
            members = old + new
            edges = [(u, v) for i, u in enumerate(members) for v in members[i + 1:] if v in new]
            b.commit(t, old, x, edges)
            break
        else:
            b.fallback()
    return b.finish(family, k, seed)


def gen_chordal(n: int, delta: int, seed: int, max_clique: int | None = None) -> GeneratedInstance:
    """Connected chordal graph grown from a random clique tree.

    Each step glues a new clique onto a subset of an existing one, so every
    new vertex has a clique neighbourhood and chordality is preserved. Bags
    are the cliques, giving a witness of length 1.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if delta < 2:
        raise ValueError("delta must be at least 2")
    cap = min(delta + 1, 4) if max_clique is None else max_clique
    if cap < 2:
        raise ValueError("clique cap must be at least 2")
    return _clique_tree(n, delta, seed, cap, "chordal", 1)


def _bag_diameter(members: list[int], adj: list[set[int]], extra: list[tuple[int, int]]) -> int | None:
    """Diameter of the subgraph induced by ``members`` (plus ``extra`` edges); None if disconnected."""
    inside = set(members)
    local = {v: {w for w in adj[v] if w in inside} for v in members}
    for u, v in extra:
        local[u].add(v)
        local[v].add(u)
    worst = 0
    for s in members:
        dist = {s: 0}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in local[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if len(dist) != len(members):
            return None
        worst = max(worst, max(dist.values()))
    return worst


def gen_bounded_treelength(n: int, delta: int, k: int, seed: int) -> GeneratedInstance:
    """Random graph with a decomposition whose bags have induced diameter <= k.

    Distances in the whole graph never exceed distances inside a bag, so the
    witness length is at most ``k``. Bags are either rings of length up to
    ``2k + 1`` hung from one old vertex, or random trees with a few chords
    glued onto up to two old vertices. Any attempt that breaks the degree cap
    or the diameter bound is discarded; after repeated failures a single
    pendant vertex is added instead.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if delta < 2:
        raise ValueError("delta must be at least 2")
    if k < 1:
        raise ValueError("k must be at least 1")
    if k == 1:
        return _clique_tree(n, delta, seed, min(delta + 1, 4), "treelength", 1)

    rng = random.Random(seed)
    b = _Builder(n, delta, rng)
    b.commit(None, [], 1, [])
    while b.remaining:
        for _ in range(_ATTEMPTS):
            t = rng.randrange(len(b.bags))
            proposal = _propose_bag(b, b.bags[t], k)
            if proposal is not None:
                old, x, edges = proposal
                b.commit(t, old, x, edges)
                break
        else:
            b.fallback()
    return b.finish("treelength", k, seed)


def _propose_bag(b: _Builder, bag: list[int], k: int):
    rng = b.rng
    spare = [v for v in bag if b.residual(v) > 0]
    if not spare:
        return None
    start = b.placed
    if rng.random() < 0.45:
        # ring through one old vertex
        length = rng.randint(3, 2 * k + 1)
        x = length - 1
        if x > b.remaining:
            return None
        hub = rng.choice(spare)
        if b.residual(hub) < 2:
            return None
        ring = [hub] + list(range(start, start + x))
        edges = [(ring[i], ring[(i + 1) % length]) for i in range(length)]
        old = [hub]
    else:
        x = rng.randint(1, min(2 * k, b.remaining))
        o = 1 if len(spare) == 1 or rng.random() < 0.6 else 2
        old = sorted(rng.sample(spare, o))
        members = list(old)
        degree = {v: len(b.adj[v]) for v in old}
        edges = []
        for v in range(start, start + x):
            degree[v] = 0
            choices = [u for u in members if degree[u] < b.delta]
            if not choices:
                return None
            u = members[0] if rng.random() < 0.5 and degree[members[0]] < b.delta else rng.choice(choices)
            edges.append((u, v))
            degree[u] += 1
            degree[v] += 1
            members.append(v)
        for _ in range(rng.randint(0, 2)):
            u, v = rng.sample(members, 2)
            if u in old and v in old:
                continue
            pair = (min(u, v), max(u, v))
            if pair in edges or u in b.adj[v]:
                continue
            if degree[u] < b.delta and degree[v] < b.delta:
                edges.append(pair)
                degree[u] += 1
                degree[v] += 1
        # join the old vertices if the new ones did not
        if _bag_diameter(members, b.adj, edges) is None:
            u, v = old
            if degree[u] >= b.delta or degree[v] >= b.delta:
                return None
            edges.append((u, v))
            degree[u] += 1
            degree[v] += 1

    members = old + list(range(start, start + x))
    degree_after = {v: len(b.adj[v]) for v in members if v < start}
    degree_after.update({v: 0 for v in range(start, start + x)})
    for u, v in edges:
        degree_after[u] += 1
        degree_after[v] += 1
    if any(d > b.delta for d in degree_after.values()):
        return None
    diameter = _bag_diameter(members, b.adj, edges)
    if diameter is None or diameter > k:
        return None
    if not b.keeps_room(degree_after, x):
        return None
    return old, x, edges


def gen_cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def gen_grid(p: int, q: int) -> Graph:
    if p < 1 or q < 1:
        raise ValueError("grid sides must be positive")
    edges = []
    for i in range(p):
        for j in range(q):
            v = i * q + j
            if j + 1 < q:
                edges.append((v, v + 1))
            if i + 1 < p:
                edges.append((v, v + q))
    return Graph(p * q, edges)


FAMILIES = ("tree", "chordal", "treelength", "cycle", "grid")


def generate(family: str, n: int, delta: int = 3, k: int = 1, seed: int = 0, q: int | None = None) -> GeneratedInstance:
    """Dispatch on family name; cycles and grids carry no witness."""
    if family == "tree":
        return gen_random_tree(n, delta, seed)
    if family == "chordal":
        return gen_chordal(n, delta, seed)
    if family == "treelength":
        return gen_bounded_treelength(n, delta, k, seed)
    if family == "cycle":
        return GeneratedInstance(gen_cycle(n), None, InstanceParams("cycle", n, 2, k, seed))
    if family == "grid":
        g = gen_grid(n, q if q is not None else n)
        return GeneratedInstance(g, None, InstanceParams("grid", g.n, 4, k, seed))
    raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


def save_witness(td: TreeDecomposition, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(td.to_dict(), fh)
        fh.write("\n")


def load_witness(path: str | Path) -> TreeDecomposition:
    with open(path) as fh:
        return TreeDecomposition.from_dict(json.load(fh))


__all__ = [
    "TreeDecomposition",
    "ValidationReport",
    "validate_decomposition",
    "decomposition_length",
    "bag_half_separator",
    "exact_treelength",
    "InstanceParams",
    "GeneratedInstance",
    "gen_random_tree",
    "gen_chordal",
    "gen_bounded_treelength",
    "gen_cycle",
    "gen_grid",
    "generate",
    "FAMILIES",
]
