"""Disjoint-set union with path halving and union by size."""

from __future__ import annotations

from typing import Hashable, Iterable


class DisjointSet:
    def __init__(self, elements: Iterable[Hashable] = ()):
        self.parent: dict = {}
        self.size: dict = {}
        for e in elements:
            self.add(e)

    def add(self, e) -> None:
        if e not in self.parent:
            self.parent[e] = e
            self.size[e] = 1

    def find(self, e):
        self.add(e)
        parent = self.parent
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def sorted_sets(self) -> list[list]:
        """Blocks as sorted lists, ordered by smallest element."""
        groups: dict = {}
        for e in self.parent:
            groups.setdefault(self.find(e), []).append(e)
        return sorted(sorted(g) for g in groups.values())
