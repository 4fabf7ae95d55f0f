"""Disjoint sets over ``0..n-1`` whose representative is the smallest member."""

from __future__ import annotations


class UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of ``a`` and ``b``; the smaller root survives."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def groups(self, members=None) -> dict[int, list[int]]:
        """Map representative -> sorted members (restricted to ``members`` if given)."""
        out: dict[int, list[int]] = {}
        for x in (range(len(self.parent)) if members is None else sorted(members)):
            out.setdefault(self.find(x), []).append(x)
        return out
