"""Scale-N end classes, their bonding maps, and windows of them.

A class at scale N is computed as a persistent far component of the scale-N
graph.  Its representative is the shortest N-path from the basepoint into the
shell of that component, ties broken lexicographically in canonical vertex
order.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

from .dirseq import ConcreteSequence, SetMap, freeze
from .rips import RipsFiltration, ScaleAnalysis, ThinTruncationError, TruncationParams, _check_scale
from .space import Label, Space


class InternalError(AssertionError):
    pass


@dataclass(frozen=True)
class SigmaClass:
    scale: int
    id: Label
    representative: tuple

    def to_json(self, space: Space) -> dict:
        enc = space.label_to_json
        return {"id": enc(self.id), "representative": [enc(p) for p in self.representative]}


@dataclass(frozen=True, eq=False)
class SigmaLevel:
    scale: int
    truncation: TruncationParams
    classes: tuple
    analysis: ScaleAnalysis = field(repr=False)

    @property
    def ids(self) -> tuple:
        return tuple(c.id for c in self.classes)

    def __len__(self) -> int:
        return len(self.classes)

    def by_id(self, cid: Label) -> SigmaClass:
        for c in self.classes:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def locate(self, path: Sequence[Label]) -> Label:
        """Class id of the sequence whose finite prefix is ``path``."""
        return self.analysis.locate(path)


def _representatives(analysis: ScaleAnalysis) -> dict:
    graph = analysis.graph
    order = {0: 0}
    parent = {0: None}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in graph.adjacency[i]:
            if j not in parent:
                parent[j] = i
                order[j] = len(order)
                queue.append(j)
    threshold = graph.resolved.shell_threshold
    index = graph.index
    best: dict = {}
    for cid in analysis.persistent:
        candidates = [index[v] for v in analysis.partition.members[cid]
                      if graph.norms[index[v]] > threshold and index[v] in parent]
        # BFS discovery order is (hop length, lexicographic path) order
        end = min(candidates, key=order.__getitem__)
        path = []
        while end is not None:
            path.append(graph.vertices[end])
            end = parent[end]
        best[cid] = tuple(reversed(path))
    return best


def _level_from_analysis(analysis: ScaleAnalysis) -> SigmaLevel:
    reps = _representatives(analysis)
    classes = tuple(SigmaClass(analysis.scale, cid, reps[cid]) for cid in analysis.persistent)
    return SigmaLevel(analysis.scale, analysis.graph.resolved, classes, analysis)


def sigma_level(space: Space, scale: int, truncation: TruncationParams) -> SigmaLevel:
    """The finite set of scale-N end classes seen by the truncation."""
    scale = _check_scale(scale)
    trunc = truncation.resolve(scale)
    graph = RipsFiltration(space, trunc.outer_radius, scale).graph(scale, trunc)
    return _level_from_analysis(ScaleAnalysis(graph))


def _bond(lower: SigmaLevel, upper: SigmaLevel) -> SetMap:
    table = {}
    for c in lower.classes:
        tail = c.representative[-1]
        target = upper.analysis.partition.component_of.get(tail)
        if target is None or not upper.analysis.is_persistent(target):
            raise InternalError(
                f"scale-{lower.scale} class {c.id!r} does not sit in a persistent "
                f"scale-{upper.scale} component")
        table[c.id] = target
    return SetMap(lower.ids, upper.ids, table)


def bonding_map(space: Space, scale: int, truncation: TruncationParams) -> SetMap:
    """phi_N : sigma_N -> sigma_{N+1} on a common truncation."""
    window = ind_sigma(space, (scale, scale + 1), truncation)
    return window.bondings[scale]


@dataclass(frozen=True, eq=False)
class SigmaWindow:
    space: Space
    truncation: TruncationParams
    levels: dict
    bondings: dict

    @property
    def start(self) -> int:
        return min(self.levels)

    @property
    def stop(self) -> int:
        return max(self.levels)

    def sizes(self) -> tuple:
        return tuple(len(self.levels[n]) for n in sorted(self.levels))

    def to_direct_sequence(self, json_labels: bool = False) -> ConcreteSequence:
        """The window as a concrete direct sequence of class ids.

        With ``json_labels`` the ids are the (frozen) JSON forms of the labels,
        so the sequence serializes as it is.
        """
        order = sorted(self.levels)
        rename = (lambda x: freeze(self.space.label_to_json(x))) if json_labels else (lambda x: x)
        return ConcreteSequence(
            start=order[0],
            levels=[[rename(x) for x in self.levels[n].ids] for n in order],
            bondings=[{rename(x): rename(y) for x, y in self.bondings[n].table.items()}
                      for n in order[:-1]],
        )

    def to_json(self) -> dict:
        enc = self.space.label_to_json
        return {
            "space": self.space.to_spec(),
            "window": [self.start, self.stop],
            "truncation": self.truncation.to_json(),
            "levels": [
                {"N": n, "count": len(lvl), "classes": [c.to_json(self.space) for c in lvl.classes]}
                for n, lvl in sorted(self.levels.items())
            ],
            "bondings": [
                {"from": n, "to": n + 1, "bijective": b.is_bijective(), "injective": b.is_injective(),
                 "map": [[enc(x), enc(b(x))] for x in b.domain]}
                for n, b in sorted(self.bondings.items())
            ],
            "stability": sigma_stability(self).to_json() if len(self.levels) > 1 else None,
        }


def ind_sigma(space: Space, window: tuple[int, int], truncation: TruncationParams,
              workers: int = 1) -> SigmaWindow:
    """Levels ``N_min..N_max`` and their bonding maps on one truncation.

    The inner radius defaults to ``N_max`` for every level so that scale-N
    components nest inside scale-(N+1) components.
    """
    lo, hi = (_check_scale(w) for w in window)
    if lo > hi:
        raise ValueError(f"empty scale window {lo}..{hi}")
    if truncation.inner_radius is None and hi >= truncation.outer_radius:
        raise ThinTruncationError(
            f"default inner radius {hi} does not fit inside R={truncation.outer_radius}")
    common = TruncationParams(
        truncation.outer_radius,
        truncation.inner_radius if truncation.inner_radius is not None else hi,
        truncation.witness_margin,
    )
    filtration = RipsFiltration(space, common.outer_radius, hi)

    def level(n: int) -> SigmaLevel:
        graph = filtration.graph(n, common.resolve(n))
        return _level_from_analysis(ScaleAnalysis(graph))

    scales = range(lo, hi + 1)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            levels = dict(zip(scales, pool.map(level, scales)))
    else:
        levels = {n: level(n) for n in scales}
    bondings = {n: _bond(levels[n], levels[n + 1]) for n in range(lo, hi)}
    return SigmaWindow(space, common, levels, bondings)


@dataclass(frozen=True)
class StabilityReport:
    window: tuple
    stable: bool
    threshold: int | None
    note: str = "window-relative evidence only; not a proof of sigma-stability"

    def to_json(self) -> dict:
        return {
            "window": list(self.window),
            "verdict": f"stable with K={self.threshold} (window-relative)" if self.stable
            else "not stable within window",
            "stable_in_window": self.stable,
            "K": self.threshold,
            "note": self.note,
        }


def sigma_stability(window: SigmaWindow) -> StabilityReport:
    """Least K in the window with every bonding at N >= K a bijection."""
    if len(window.levels) < 2:
        raise ValueError("stability needs at least two levels")
    span = (window.start, window.stop)
    threshold = None
    for n in range(window.stop - 1, window.start - 1, -1):
        if not window.bondings[n].is_bijective():
            break
        threshold = n
    return StabilityReport(span, threshold is not None, threshold)
