"""Literal N-sequence machinery on finite models, used as an oracle.

Finite proxies:

* a sequence "goes to infinity" when its last term lies in the shell
  (norm > R - W);
* its *tail* is the part after its last visit to the inner ball (norm <= r);
* ``s`` is related to ``t`` when ``s`` is a subsequence of ``t`` whose last
  term lands in the tail of ``t``.  For infinite sequences a subsequence
  shares the supersequence's tail, so the finite relation keeps that.

:func:`oracle_classes` enumerates the shell-reaching simple N-paths and joins
two of them whenever a shell-reaching N-walk contains both, searched for
directly in the product of the two paths with the walk.  Walks that revisit
points reduce to simple paths by deleting loops, so simple paths meet every
class.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Sequence

from .rips import RipsFiltration, TruncationParams
from .space import Label, Space
from .unionfind import UnionFind


class OracleGuardError(RuntimeError):
    """The model is too large for exhaustive enumeration."""


def is_n_sequence(seq: Sequence[Label], scale: Any, space: Space) -> bool:
    return all(space.distance(a, b) <= scale for a, b in zip(seq, seq[1:]))


def embed(s: Sequence, t: Sequence) -> list[int] | None:
    """Greedy earliest order-preserving positions of ``s`` inside ``t``."""
    out, k = [], 0
    for x in s:
        while k < len(t) and t[k] != x:
            k += 1
        if k == len(t):
            return None
        out.append(k)
        k += 1
    return out


def is_subsequence(s: Sequence, t: Sequence) -> bool:
    return embed(s, t) is not None


def tail_start(t: Sequence[Label], space: Space, inner_radius) -> int:
    """Index of the first term after the last visit to the inner ball."""
    last = -1
    for k, p in enumerate(t):
        if space.norm(p) <= inner_radius:
            last = k
    return last + 1


def is_tail_subsequence(s: Sequence[Label], t: Sequence[Label], space: Space, inner_radius) -> bool:
    """``s`` embeds in ``t`` with its last term inside the tail of ``t``."""
    if not s:
        return True
    head = embed(s[:-1], t)
    if head is None:
        return False
    lo = max(head[-1] + 1 if head else 0, tail_start(t, space, inner_radius))
    return any(t[k] == s[-1] for k in range(lo, len(t)))


@dataclass(frozen=True, eq=False)
class OracleModel:
    """A truncated space prepared for exhaustive enumeration."""

    space: Space
    truncation: TruncationParams
    max_length: int | None = None
    max_paths: int = 20000

    def __post_init__(self) -> None:
        if not self.truncation.is_resolved:
            raise ValueError("oracle models need explicit r and W")
        self.truncation.check_thickness()

    @property
    def vertices(self) -> tuple:
        return self.space.ball(self.truncation.outer_radius)

    def shell(self) -> tuple:
        t = self.truncation.shell_threshold
        return tuple(v for v in self.vertices if self.space.norm(v) > t)

    def length_cap(self) -> int:
        return len(self.vertices) if self.max_length is None else self.max_length


@dataclass
class OracleResult:
    scale: int
    paths: list
    classes: list  # list of lists of paths
    witnesses: dict = field(default_factory=dict)  # (path_a, path_b) -> supersequence

    @property
    def count(self) -> int:
        return len(self.classes)

    def partition(self) -> frozenset:
        return frozenset(frozenset(c) for c in self.classes)

    def witness(self, a: tuple, b: tuple) -> list | None:
        """A chain of supersequences joining ``a`` to ``b`` inside one class."""
        adjacency: dict = {}
        for (p, q), w in self.witnesses.items():
            adjacency.setdefault(p, []).append((q, w))
            adjacency.setdefault(q, []).append((p, w))
        prev = {a: None}
        queue = deque([a])
        while queue:
            p = queue.popleft()
            if p == b:
                chain = []
                while prev[p] is not None:
                    q, w = prev[p]
                    chain.append((q, w, p))
                    p = q
                return chain[::-1]
            for q, w in adjacency.get(p, ()):
                if q not in prev:
                    prev[q] = (p, w)
                    queue.append(q)
        return None


class _Graph:
    def __init__(self, model: OracleModel, scale: int) -> None:
        space, trunc = model.space, model.truncation
        filt = RipsFiltration(space, trunc.outer_radius, scale)
        self.vertices = filt.vertices
        self.index = filt.index
        adj: list[list[int]] = [[] for _ in self.vertices]
        # adjacency from the literal distance, not from the filtration
        for i, a in enumerate(self.vertices):
            for j, b in enumerate(self.vertices):
                if i != j and space.distance(a, b) <= scale:
                    adj[i].append(j)
        self.adj = adj
        norms = [space.norm(v) for v in self.vertices]
        self.inner = [n <= trunc.inner_radius for n in norms]
        self.shell = [n > trunc.shell_threshold for n in norms]


def shell_paths(model: OracleModel, scale: int) -> list[tuple]:
    """All simple N-paths from the basepoint, of length <= L, ending in the shell."""
    g = _Graph(model, scale)
    return [tuple(g.vertices[i] for i in p) for p in _index_paths(model, g)]


def _index_paths(model: OracleModel, g: _Graph) -> list[tuple]:
    cap, limit = model.length_cap(), model.max_paths
    out: list[tuple] = []
    visited = [False] * len(g.vertices)
    stack = [0]
    visited[0] = True
    explored = 0

    def grow() -> None:
        nonlocal explored
        explored += 1
        if explored > 50 * limit:
            raise OracleGuardError(f"more than {50 * limit} partial paths explored")
        here = stack[-1]
        if g.shell[here]:
            out.append(tuple(stack))
            if len(out) > limit:
                raise OracleGuardError(f"more than {limit} shell-reaching paths")
        if len(stack) >= cap:
            return
        for j in g.adj[here]:
            if not visited[j]:
                visited[j] = True
                stack.append(j)
                grow()
                stack.pop()
                visited[j] = False

    grow()
    return out


def _common_supersequence(g: _Graph, p: tuple, q: tuple) -> list | None:
    """Shortest shell-ending N-walk from the basepoint with both paths as tail subsequences.

    State: (matched prefix of p, matched prefix of q, current vertex).  Once a
    path's last term is matched the walk may no longer enter the inner ball.
    """
    lp, lq = len(p), len(q)
    start = (1, 1, 0)
    parent = {start: None}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        i, j, v = state
        if i == lp and j == lq and g.shell[v]:
            walk = []
            while state is not None:
                walk.append(state[2])
                state = parent[state]
            return walk[::-1]
        locked = i == lp or j == lq
        for w in g.adj[v]:
            if locked and g.inner[w]:
                continue
            options_i = [i]
            if i < lp and p[i] == w:
                options_i = [i + 1] if i + 1 < lp else [i + 1, i]
            options_j = [j]
            if j < lq and q[j] == w:
                options_j = [j + 1] if j + 1 < lq else [j + 1, j]
            for ni in options_i:
                for nj in options_j:
                    if (ni == lp or nj == lq) and g.inner[w]:
                        continue
                    nxt = (ni, nj, w)
                    if nxt not in parent:
                        parent[nxt] = state
                        queue.append(nxt)
    return None


def _tail_reach(g: _Graph, a: int) -> set:
    """Vertices joined to ``a`` by an N-walk avoiding the inner ball."""
    seen = {a}
    queue = deque([a])
    while queue:
        v = queue.popleft()
        for w in g.adj[v]:
            if w not in seen and not g.inner[w]:
                seen.add(w)
                queue.append(w)
    return seen


def oracle_classes(model: OracleModel, scale: int) -> OracleResult:
    """Chain-equivalence classes of shell-reaching N-paths, by exhaustive search.

    Two paths are joined only when an explicit common supersequence walk is
    found.  A pair is skipped without search when no walk can connect their
    last terms outside the inner ball, since every common supersequence would
    contain one.
    """
    g = _Graph(model, scale)
    paths = _index_paths(model, g)
    uf = UnionFind(len(paths))
    witnesses: dict = {}
    reach_cache: dict = {}
    members: dict[int, list[int]] = {}
    for k, p in enumerate(paths):
        reach = reach_cache.get(p[-1])
        if reach is None:
            reach = reach_cache[p[-1]] = _tail_reach(g, p[-1])
        for root in list(members):
            if uf.find(root) == uf.find(k):
                continue
            # members are tried in order; one explicit witness suffices
            for m in members[root]:
                q = paths[m]
                if q[-1] not in reach:
                    continue
                walk = _common_supersequence(g, p, q)
                if walk is not None:
                    uf.union(m, k)
                    witnesses[(q, p)] = tuple(walk)
                    break
        merged: dict[int, list[int]] = {}
        for root, group in members.items():
            merged.setdefault(uf.find(root), []).extend(group)
        merged.setdefault(uf.find(k), []).append(k)
        members = {r: sorted(g_) for r, g_ in merged.items()}
    verts = g.vertices
    to_labels = lambda path: tuple(verts[i] for i in path)  # noqa: E731
    groups = uf.groups()
    classes = [[to_labels(paths[i]) for i in g_] for _, g_ in sorted(groups.items())]
    labelled = {(to_labels(a), to_labels(b)): to_labels(w) for (a, b), w in witnesses.items()}
    return OracleResult(scale, [to_labels(p) for p in paths], classes, labelled)


@dataclass
class OracleAgreement:
    scale: int
    sigma_count: int
    oracle_count: int
    paths: int
    partition_agrees: bool

    @property
    def agrees(self) -> bool:
        return self.sigma_count == self.oracle_count and self.partition_agrees

    def to_json(self) -> dict:
        return {"N": self.scale, "sigma": self.sigma_count, "oracle": self.oracle_count,
                "paths": self.paths, "partition_agrees": self.partition_agrees, "agrees": self.agrees}


def oracle_agreement(level, model: OracleModel) -> OracleAgreement:
    """Compare a computed sigma level with the oracle on the same truncation.

    Each shell-reaching path is assigned the far component of its last vertex;
    the two partitions of the path set must coincide.
    """
    result = oracle_classes(model, level.scale)
    component_of = level.analysis.partition.component_of
    by_component: dict = {}
    for p in result.paths:
        by_component.setdefault(component_of[p[-1]], set()).add(p)
    same = result.partition() == frozenset(frozenset(v) for v in by_component.values())
    return OracleAgreement(level.scale, len(level), result.count, len(result.paths), same)
