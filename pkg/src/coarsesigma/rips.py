"""Scale-N neighborhood graphs on truncated spaces and their far components.

A path in the scale-N graph is exactly a finite N-sequence.  The components
of the graph outside the inner ball that reach the outer shell, and are
reachable from the basepoint, are the truncation-visible ends at scale N.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from .space import Label, Space, SpaceError, as_rational
from .unionfind import UnionFind


class ThinTruncationError(ValueError):
    """The shell of width W does not clear the inner ball."""


class TruncationMismatchError(ValueError):
    """A path cannot be located among the far components of a truncation."""


@dataclass(frozen=True)
class TruncationParams:
    """Outer radius R, inner radius r and witness margin W.

    ``None`` for r or W means "use the default at the scale in play":
    ``r = scale`` and ``W = scale + 1``.
    """

    outer_radius: Fraction
    inner_radius: Fraction | None = None
    witness_margin: Fraction | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "outer_radius", as_rational(self.outer_radius))
        if self.outer_radius <= 0:
            raise SpaceError("outer radius must be positive")
        if self.inner_radius is not None:
            r = as_rational(self.inner_radius)
            object.__setattr__(self, "inner_radius", r)
            if not 0 <= r < self.outer_radius:
                raise SpaceError(f"need 0 <= r < R, got r={r}, R={self.outer_radius}")
        if self.witness_margin is not None:
            w = as_rational(self.witness_margin)
            object.__setattr__(self, "witness_margin", w)
            if w <= 0:
                raise SpaceError("witness margin must be positive")

    @property
    def is_resolved(self) -> bool:
        return self.inner_radius is not None and self.witness_margin is not None

    def resolve(self, scale: int, inner_scale: int | None = None) -> TruncationParams:
        r = self.inner_radius
        if r is None:
            r = Fraction(scale if inner_scale is None else inner_scale)
            if r >= self.outer_radius:
                raise ThinTruncationError(
                    f"default inner radius {r} does not fit inside R={self.outer_radius}")
        w = self.witness_margin if self.witness_margin is not None else Fraction(scale + 1)
        return TruncationParams(self.outer_radius, r, w)

    @property
    def shell_threshold(self) -> Fraction:
        """Vertices with norm strictly above this value form the witness shell."""
        return self.outer_radius - self.witness_margin

    def check_thickness(self) -> None:
        if self.shell_threshold <= self.inner_radius:
            raise ThinTruncationError(
                f"R - W = {self.shell_threshold} <= r = {self.inner_radius}: "
                "truncation too thin to witness persistence")

    def to_json(self) -> dict:
        return {
            "outer_radius": str(self.outer_radius),
            "inner_radius": None if self.inner_radius is None else str(self.inner_radius),
            "witness_margin": None if self.witness_margin is None else str(self.witness_margin),
        }


def _check_scale(scale: Any) -> int:
    if isinstance(scale, bool) or not isinstance(scale, int) or scale < 1:
        raise SpaceError(f"scale must be a positive integer, got {scale!r}")
    return scale


@dataclass(frozen=True, eq=False)
class RipsGraph:
    space: Space
    scale: int
    truncation: TruncationParams
    vertices: tuple
    norms: tuple
    index: dict
    edges: tuple
    adjacency: tuple

    @property
    def basepoint_index(self) -> int:
        return 0

    @property
    def resolved(self) -> TruncationParams:
        """The truncation with r and W filled in for this scale."""
        t = self.truncation
        return t if t.is_resolved else t.resolve(self.scale)

    def has_edge(self, a: Label, b: Label) -> bool:
        i, j = self.index[a], self.index[b]
        return j in self.adjacency[i]


class RipsFiltration:
    """All edges up to ``max_scale`` on ``ball(outer_radius)``, with their lengths.

    Graphs at smaller scales are obtained by thresholding, so every distance
    is computed once.
    """

    def __init__(self, space: Space, outer_radius: Any, max_scale: int) -> None:
        self.space = space
        self.outer_radius = as_rational(outer_radius)
        self.max_scale = _check_scale(max_scale)
        self.vertices = space.ball(self.outer_radius)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.norms = tuple(space.norm(v) for v in self.vertices)
        # an edge of length d is present at integer scale N iff ceil(d) <= N
        by_scale: list[set] = [set() for _ in range(self.max_scale + 1)]
        for i, v in enumerate(self.vertices):
            for w, d in space.neighbors(v, max_scale, self.outer_radius):
                j = self.index[w]
                if i < j:
                    by_scale[math.ceil(d)].add((i, j))
        self.edges_at = tuple(tuple(sorted(e)) for e in by_scale)

    def graph(self, scale: int, truncation: TruncationParams) -> RipsGraph:
        scale = _check_scale(scale)
        if scale > self.max_scale:
            raise ValueError(f"scale {scale} above filtration maximum {self.max_scale}")
        if truncation.outer_radius != self.outer_radius:
            raise ValueError("truncation radius differs from the filtration radius")
        adjacency: list[list[int]] = [[] for _ in self.vertices]
        edges = []
        for bucket in self.edges_at[:scale + 1]:
            edges.extend(bucket)
        for i, j in edges:
            adjacency[i].append(j)
            adjacency[j].append(i)
        edges.sort()
        return RipsGraph(
            space=self.space,
            scale=scale,
            truncation=truncation,
            vertices=self.vertices,
            norms=self.norms,
            index=self.index,
            edges=tuple(edges),
            adjacency=tuple(tuple(sorted(a)) for a in adjacency),
        )


def build_rips(space: Space, scale: int, truncation: TruncationParams) -> RipsGraph:
    """Scale-``scale`` neighborhood graph on ``ball(R)``."""
    return RipsFiltration(space, truncation.outer_radius, scale).graph(scale, truncation)


@dataclass(frozen=True)
class ComponentPartition:
    """Components of the graph restricted to vertices with norm > r.

    Component ids are the canonically smallest member.
    """

    inner_radius: Fraction
    component_of: dict
    members: dict

    @property
    def ids(self) -> tuple:
        return tuple(self.members)


def _outside_groups(graph: RipsGraph, inner_radius: Fraction) -> dict[int, list[int]]:
    outside = [i for i, n in enumerate(graph.norms) if n > inner_radius]
    keep = set(outside)
    uf = UnionFind(len(graph.vertices))
    for i, j in graph.edges:
        if i in keep and j in keep:
            uf.union(i, j)
    return uf.groups(outside)


def components_outside(graph: RipsGraph, inner_radius: Any = None) -> ComponentPartition:
    """Connected components of the subgraph on ``{v : |v| > r}``."""
    r = graph.resolved.inner_radius if inner_radius is None else as_rational(inner_radius)
    if not 0 <= r < graph.truncation.outer_radius:
        raise SpaceError(f"need 0 <= r < R, got r={r}")
    groups = _outside_groups(graph, r)
    verts = graph.vertices
    members = {verts[root]: tuple(verts[i] for i in group) for root, group in sorted(groups.items())}
    component_of = {v: cid for cid, group in members.items() for v in group}
    return ComponentPartition(r, component_of, members)


def reachable_from_basepoint(graph: RipsGraph) -> frozenset:
    seen = {0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in graph.adjacency[i]:
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return frozenset(seen)


class ScaleAnalysis:
    """Far components of one scale-N graph and the persistent ones among them.

    A component is persistent when it contains a shell vertex (norm > R - W)
    and can be reached from the basepoint by an N-path inside the truncation.
    """

    def __init__(self, graph: RipsGraph) -> None:
        trunc = graph.resolved
        trunc.check_thickness()
        self.graph = graph
        self.partition = components_outside(graph)
        self.reachable = reachable_from_basepoint(graph)
        threshold = trunc.shell_threshold
        index = graph.index
        persistent = []
        for cid, group in self.partition.members.items():
            if index[cid] not in self.reachable:
                continue
            if any(graph.norms[index[v]] > threshold for v in group):
                persistent.append(cid)
        self.persistent = tuple(persistent)
        self._persistent_set = frozenset(persistent)

    @property
    def scale(self) -> int:
        return self.graph.scale

    def is_persistent(self, cid: Label) -> bool:
        return cid in self._persistent_set

    def shell(self) -> tuple:
        t = self.graph.resolved.shell_threshold
        return tuple(v for v, n in zip(self.graph.vertices, self.graph.norms) if n > t)

    def locate(self, path: Sequence[Label]) -> Label:
        """Persistent component carrying the tail of ``path``.

        The tail is the run of terms after the last visit to the inner ball,
        cut where the path leaves the truncation.  All its terms must lie in
        one persistent component.
        """
        space = self.graph.space
        trunc = self.graph.resolved
        norms = [space.norm(space.canonical(p)) for p in path]
        inner = [k for k, n in enumerate(norms) if n <= trunc.inner_radius]
        start = inner[-1] + 1 if inner else 0
        run = []
        for p, n in zip(path[start:], norms[start:]):
            if n > trunc.outer_radius:
                break
            run.append(space.canonical(p))
        if not run:
            raise TruncationMismatchError(
                f"path ending at {path[-1]!r} has no tail inside the truncation "
                f"(r={trunc.inner_radius}, R={trunc.outer_radius})")
        cids = {self.partition.component_of[p] for p in run}
        if len(cids) != 1:
            raise TruncationMismatchError(
                f"tail of path ending at {path[-1]!r} is not a {self.scale}-path")
        (cid,) = cids
        if not self.is_persistent(cid):
            raise TruncationMismatchError(
                f"path ending at {path[-1]!r} lands in non-persistent component {cid!r}")
        return cid


def persistent_components(space: Space, scale: int, truncation: TruncationParams) -> tuple:
    """Ids of the persistent far components at ``scale``."""
    return ScaleAnalysis(build_rips(space, scale, truncation)).persistent


def path_outside(graph: RipsGraph, a: Label, b: Label, inner_radius: Any = None) -> list | None:
    """A BFS path from ``a`` to ``b`` using only vertices with norm > r, or None."""
    r = graph.resolved.inner_radius if inner_radius is None else as_rational(inner_radius)
    ia, ib = graph.index[a], graph.index[b]
    if graph.norms[ia] <= r or graph.norms[ib] <= r:
        return None
    parent = {ia: None}
    queue = deque([ia])
    while queue:
        i = queue.popleft()
        if i == ib:
            out = []
            while i is not None:
                out.append(graph.vertices[i])
                i = parent[i]
            return out[::-1]
        for j in graph.adjacency[i]:
            if j not in parent and graph.norms[j] > r:
                parent[j] = i
                queue.append(j)
    return None


def to_dot(graph: RipsGraph) -> str:
    """Graphviz rendering of the scale-N graph."""
    label = graph.space.label_to_json
    lines = [f"graph rips_N{graph.scale} {{"]
    for i, v in enumerate(graph.vertices):
        lines.append(f'  v{i} [label="{label(v)}"];')
    for i, j in graph.edges:
        lines.append(f"  v{i} -- v{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
