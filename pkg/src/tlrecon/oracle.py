"""Counting distance oracle over a hidden connected graph."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix

from ._bfs import bfs_rows
from .graph import DistanceTable, Graph, is_connected


class BudgetExhausted(RuntimeError):
    """The run asked for more distinct pairs than its allowance."""


@dataclass
class OracleStats:
    distinct_pairs: int = 0
    total_calls: int = 0
    per_depth: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "distinct_pairs": self.distinct_pairs,
            "total_calls": self.total_calls,
            "per_depth": {str(d): c for d, c in sorted(self.per_depth.items())},
        }


def _unique(vertices: Iterable[int]) -> np.ndarray:
    """Vertex ids as an int64 array, first occurrence order, duplicates dropped."""
    if isinstance(vertices, np.ndarray):
        arr = vertices.astype(np.int64, copy=False).ravel()
    else:
        arr = np.fromiter((int(v) for v in vertices), dtype=np.int64)
    _, first = np.unique(arr, return_index=True)
    if len(first) != len(arr):
        arr = arr[np.sort(first)]
    return arr


class CountingOracle:
    """Answers exact hop distances in a hidden graph and counts what was asked.

    ``distinct_pairs`` counts unordered pairs the first time they are asked
    (a pair ``{u, u}`` counts too); ``total_calls`` counts every request.
    Answers come from per-source BFS rows computed lazily and cached.
    ``depth`` is set by the caller and attributes new pairs to a recursion
    level in ``per_depth``.
    """

    # above this many vertices the asked-pair record switches from a dense
    # boolean matrix to a set of packed integer keys
    dense_limit = 8192

    def __init__(self, graph: Graph, budget: int | None = None):
        if graph.n == 0:
            raise ValueError("hidden graph must have at least one vertex")
        if not is_connected(graph):
            raise ValueError("hidden graph must be connected")
        self._graph = graph
        self.n = graph.n
        self.budget = self.n * (self.n + 1) // 2 if budget is None else int(budget)
        rows, cols = [], []
        for u in range(graph.n):
            for w in graph.neighbors(u):
                rows.append(u)
                cols.append(w)
        self._csr = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(self.n, self.n))
        self._rows: dict[int, np.ndarray] = {}
        if self.n <= self.dense_limit:
            self._asked = np.zeros((self.n, self.n), dtype=bool)
            self._asked_keys = None
        else:
            self._asked = None
            self._asked_keys: set[int] | None = set()
        self.depth = 0
        self.distinct_pairs = 0
        self.total_calls = 0
        self._per_depth: defaultdict[int, int] = defaultdict(int)

    # -- answers ---------------------------------------------------------

    def _ensure_rows(self, sources: list[int]) -> None:
        missing = [s for s in sources if s not in self._rows]
        if not missing:
            return
        for s, row in zip(missing, bfs_rows(self._csr, missing)):
            self._rows[s] = row

    def _check(self, vertices: np.ndarray) -> None:
        bad = vertices[(vertices < 0) | (vertices >= self.n)]
        if len(bad):
            raise ValueError(f"vertex {int(bad[0])} out of range for n={self.n}")

    # -- accounting ------------------------------------------------------

    def _charge(self, source: int, targets: np.ndarray) -> None:
        """Mark pairs ``{source, t}`` as asked; count the new ones."""
        if self._asked is not None:
            fresh = int(np.count_nonzero(~self._asked[source, targets]))
            if fresh:
                self._asked[source, targets] = True
                self._asked[targets, source] = True
        else:
            fresh = 0
            keys = self._asked_keys
            for t in targets.tolist():
                key = source * self.n + t if source <= t else t * self.n + source
                if key not in keys:
                    keys.add(key)
                    fresh += 1
        if fresh:
            if self.distinct_pairs + fresh > self.budget:
                raise BudgetExhausted(
                    f"query budget of {self.budget} distinct pairs exhausted"
                )
            self.distinct_pairs += fresh
            self._per_depth[self.depth] += fresh

    def prefetch(self, vertices: Iterable[int]) -> None:
        """Warm the answer cache for these sources. Not a query; nothing is counted."""
        self._ensure_rows([int(v) for v in vertices])

    def query(self, u: int, v: int) -> int:
        self._check(np.array([u, v]))
        self.total_calls += 1
        self._charge(u, np.array([v]))
        if v in self._rows:
            return int(self._rows[v][u])
        self._ensure_rows([u])
        return int(self._rows[u][v])

    def query_batch(self, A: Iterable[int], B: Iterable[int]) -> DistanceTable:
        """All distances ``d(a, b)``, charged as ``|A| * |B|`` single queries."""
        src, tgt = _unique(A), _unique(B)
        if not len(src) or not len(tgt):
            raise ValueError("query_batch needs nonempty vertex sets")
        self._check(src)
        self._check(tgt)
        self.total_calls += len(src) * len(tgt)
        # pairs are unordered: charge and answer along the shorter side
        if len(src) <= len(tgt):
            short, long_ = src.tolist(), tgt
        else:
            short, long_ = tgt.tolist(), src
        for s in short:
            self._charge(s, long_)
        self._ensure_rows(short)
        block = np.stack([self._rows[s][long_] for s in short])
        values = block if len(src) <= len(tgt) else block.T.copy()
        return DistanceTable(src.tolist(), tgt.tolist(), values)

    # -- counters --------------------------------------------------------

    def stats(self) -> OracleStats:
        return OracleStats(self.distinct_pairs, self.total_calls, dict(self._per_depth))

    def reset_counters(self) -> None:
        """Zero the counters and forget which pairs were asked. Cached answers stay."""
        self.distinct_pairs = 0
        self.total_calls = 0
        self._per_depth.clear()
        if self._asked is not None:
            self._asked[:] = False
        else:
            self._asked_keys.clear()

    def snapshot(self) -> OracleStats:
        return self.stats()

    def restore(self, snap: OracleStats) -> None:
        """Put the counters back to ``snap``; the asked-pair record is kept."""
        self.distinct_pairs = snap.distinct_pairs
        self.total_calls = snap.total_calls
        self._per_depth = defaultdict(int, snap.per_depth)

    def answered_pairs(self) -> list[tuple[int, int]]:
        """Every unordered pair asked so far, as ``(min, max)``."""
        if self._asked is not None:
            us, vs = np.nonzero(np.triu(self._asked))
            return list(zip(us.tolist(), vs.tolist()))
        return sorted(divmod(key, self.n) for key in self._asked_keys)
