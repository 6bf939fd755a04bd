"""Simple undirected graphs over dense integer ids, with BFS-based primitives."""

from __future__ import annotations

import json
from collections import deque
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int]


class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``.

    Adjacency is kept both as sorted tuples (iteration order) and frozensets
    (membership tests).
    """

    __slots__ = ("n", "_adj", "_sets")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise ValueError(f"vertex count must be nonnegative, got {n}")
        sets: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if v in sets[u]:
                raise ValueError(f"duplicate edge ({min(u, v)}, {max(u, v)})")
            sets[u].add(v)
            sets[v].add(u)
        self.n = n
        self._adj = tuple(tuple(sorted(s)) for s in sets)
        self._sets = tuple(frozenset(s) for s in sets)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._sets[u]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self._adj) // 2

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self.n, self._adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"


def _check_vertex(g: Graph, v: int) -> None:
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range for n={g.n}")


def bfs_distances(g: Graph, source: int) -> dict[int, int]:
    """Hop distances from ``source``; unreachable vertices are absent."""
    _check_vertex(g, source)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in g.neighbors(u):
            if w not in dist:
                dist[w] = du
                queue.append(w)
    return dist


def multi_source_distances(g: Graph, sources: Iterable[int], radius: int | None = None) -> dict[int, int]:
    """Distance to the nearest source, optionally truncated at ``radius``."""
    dist: dict[int, int] = {}
    queue: deque[int] = deque()
    for s in sources:
        _check_vertex(g, s)
        if s not in dist:
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        du = dist[u]
        if radius is not None and du >= radius:
            continue
        for w in g.neighbors(u):
            if w not in dist:
                dist[w] = du + 1
                queue.append(w)
    return dist


def neighborhood_closed(g: Graph, A: Iterable[int], radius: int) -> set[int]:
    """All vertices within ``radius`` hops of some vertex of ``A`` (``A`` included)."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    return set(multi_source_distances(g, A, radius))


def connected_components(g: Graph, subset: Iterable[int]) -> list[list[int]]:
    """Components of the induced subgraph ``g[subset]``.

    Blocks are sorted, and ordered by their smallest vertex.
    """
    remaining = set(subset)
    for v in remaining:
        _check_vertex(g, v)
    blocks = []
    for start in sorted(remaining):
        if start not in remaining:
            continue
        remaining.discard(start)
        block = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in g.neighbors(u):
                if w in remaining:
                    remaining.discard(w)
                    block.append(w)
                    queue.append(w)
        blocks.append(sorted(block))
    return blocks


def induced_subgraph(g: Graph, subset: Iterable[int]) -> tuple[Graph, list[int]]:
    """Return ``(h, ids)`` where vertex ``i`` of ``h`` is vertex ``ids[i]`` of ``g``."""
    ids = sorted(set(subset))
    index = {v: i for i, v in enumerate(ids)}
    edges = []
    for i, v in enumerate(ids):
        _check_vertex(g, v)
        for w in g.neighbors(v):
            j = index.get(w)
            if j is not None and i < j:
                edges.append((i, j))
    return Graph(len(ids), edges), ids


def max_degree(g: Graph) -> int:
    return max((g.degree(v) for v in range(g.n)), default=0)


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return True
    return len(bfs_distances(g, 0)) == g.n


def edge_set(g: Graph) -> list[Edge]:
    """Canonical edge list: pairs ``(min, max)`` in lexicographic order."""
    return [(u, v) for u in range(g.n) for v in g.neighbors(u) if u < v]


def distance_matrix(g: Graph) -> np.ndarray:
    """All-pairs hop distances by repeated BFS; ``-1`` marks unreachable pairs."""
    out = np.full((g.n, g.n), -1, dtype=np.int64)
    for s in range(g.n):
        for v, d in bfs_distances(g, s).items():
            out[s, v] = d
    return out


class DistanceTable:
    """Distances ``d(u, v)`` for ``u`` in ``sources`` and ``v`` in ``targets``.

    ``values[i, j]`` holds ``d(sources[i], targets[j])``. Lookups accept either
    orientation of a pair.
    """

    def __init__(self, sources: Sequence[int], targets: Sequence[int], values: np.ndarray):
        self.sources = list(sources)
        self.targets = list(targets)
        self.values = values
        self._src: dict[int, int] | None = None
        self._tgt: dict[int, int] | None = None
        if values.shape != (len(self.sources), len(self.targets)):
            raise ValueError("values shape does not match sources x targets")

    def _index(self) -> tuple[dict[int, int], dict[int, int]]:
        if self._src is None:
            self._src = {v: i for i, v in enumerate(self.sources)}
            self._tgt = {v: j for j, v in enumerate(self.targets)}
        return self._src, self._tgt

    def __getitem__(self, pair: tuple[int, int]) -> int:
        src, tgt = self._index()
        u, v = pair
        i, j = src.get(u), tgt.get(v)
        if i is not None and j is not None:
            return int(self.values[i, j])
        i, j = src.get(v), tgt.get(u)
        if i is not None and j is not None:
            return int(self.values[i, j])
        raise KeyError(pair)

    def __contains__(self, pair: tuple[int, int]) -> bool:
        try:
            self[pair]
        except KeyError:
            return False
        return True

    def row(self, u: int) -> np.ndarray:
        return self.values[self._index()[0][u]]

    def column(self, v: int) -> np.ndarray:
        return self.values[:, self._index()[1][v]]

    def as_dict(self) -> dict[tuple[int, int], int]:
        return {
            (u, v): int(self.values[i, j])
            for i, u in enumerate(self.sources)
            for j, v in enumerate(self.targets)
        }

    def __len__(self) -> int:
        return len(self.sources) * len(self.targets)


# -- JSON ---------------------------------------------------------------------


def graph_to_dict(g: Graph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in edge_set(g)]}


def graph_from_dict(data: dict) -> Graph:
    """Parse the ``{"n": ..., "edges": [[u, v], ...]}`` form.

    Rejects self-loops and duplicate edges (in either orientation).
    """
    try:
        n = int(data["n"])
        raw = data["edges"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed graph object: {exc}") from None
    edges = []
    for e in raw:
        if len(e) != 2:
            raise ValueError(f"edge must have two endpoints: {e!r}")
        edges.append((int(e[0]), int(e[1])))
    return Graph(n, edges)


def load_graph(path: str | Path) -> Graph:
    with open(path) as fh:
        return graph_from_dict(json.load(fh))


def save_graph(g: Graph, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(graph_to_dict(g), fh)
        fh.write("\n")
