"""Controlled maps between presentations and the morphisms they induce on sigma windows.

A controlled map carries its bornology witness (a control function N -> M)
and, when it is half of a coarse equivalence, the closeness constant K of the
round trip.  Nothing here is inferred: the declared data is checked
exhaustively on a truncation.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

from .dirseq import (ConcreteSequence, EquivalenceReport, Morphism, MorphismReport, check_equivalence,
                     check_morphism, freeze)
from .rips import ThinTruncationError, TruncationMismatchError, TruncationParams
from .seqcore import is_n_sequence, is_subsequence
from .sigma import SigmaWindow, ind_sigma
from .space import Label, Rebased, Space, SpaceError, as_rational, rational_to_json


class ControlError(ValueError):
    """A declared control function or closeness constant is not valid."""


_FORMULA_RE = re.compile(r"^\s*(?P<a>\d*)\s*\*?\s*N\s*(?:\+\s*(?P<b>\d+))?\s*$")


@dataclass(frozen=True)
class ControlFunction:
    """Integer-valued, non-decreasing ``N -> M`` with ``M(N) >= N``.

    Given either as ``slope * N + offset`` or as an explicit finite table.
    """

    slope: int = 1
    offset: int = 0
    table: Mapping[int, int] | None = None

    def __post_init__(self) -> None:
        if self.table is not None:
            table = {int(n): int(m) for n, m in dict(self.table).items()}
            object.__setattr__(self, "table", table)
            keys = sorted(table)
            if not keys or keys[0] < 1:
                raise ControlError("control table must cover scales starting at 1")
            for n in keys:
                if table[n] < n:
                    raise ControlError(f"control M({n}) = {table[n]} is below {n}")
            for a, b in zip(keys, keys[1:]):
                if table[b] < table[a]:
                    raise ControlError(f"control decreases between N={a} and N={b}")
        elif self.slope < 1 or self.offset < 0:
            raise ControlError("formula controls need slope >= 1 and offset >= 0")

    @classmethod
    def parse(cls, data: Any) -> ControlFunction:
        """Accepts ``"N"``, ``"N+1"``, ``"2N+3"``, or a ``{N: M}`` table."""
        if isinstance(data, ControlFunction):
            return data
        if isinstance(data, Mapping):
            return cls(table={int(k): int(v) for k, v in data.items()})
        if isinstance(data, str):
            m = _FORMULA_RE.match(data)
            if m:
                return cls(int(m["a"] or 1), int(m["b"] or 0))
        raise ControlError(f"cannot read control function {data!r}")

    def __call__(self, n: int) -> int:
        if self.table is None:
            return self.slope * n + self.offset
        if n in self.table:
            return self.table[n]
        # beyond a finite table the declared witness is unknown
        raise ControlError(f"control table has no entry for N={n}")

    def for_distance(self, d: Fraction) -> int:
        """The bound promised for two points at distance ``d``."""
        return self(max(1, math.ceil(d)))

    def to_json(self) -> Any:
        if self.table is not None:
            return {str(n): m for n, m in sorted(self.table.items())}
        lead = "N" if self.slope == 1 else f"{self.slope}N"
        return lead if self.offset == 0 else f"{lead}+{self.offset}"


# -- point maps ---------------------------------------------------------------------

def _floor_label(space: Space, a: Label) -> Label:
    return Fraction(math.floor(a))


def _ray_floor_label(space: Space, a: Label) -> Label:
    if len(a) == 1:
        return a
    ray, t = a
    return (ray, ray * math.floor(t / ray))


BUILTIN_MAPS: dict[str, Callable[[Space, Label], Label]] = {
    "identity": lambda space, a: a,
    "inclusion": lambda space, a: a,
    "floor": _floor_label,
    "ray_floor": _ray_floor_label,
}


@dataclass(frozen=True, eq=False)
class ControlledMap:
    """A point map ``source -> target`` with its declared control and closeness data."""

    source: Space
    target: Space
    point_map: Callable[[Label], Label]
    control: ControlFunction
    closeness: Fraction | None = None
    name: str = "map"

    def __post_init__(self) -> None:
        object.__setattr__(self, "control", ControlFunction.parse(self.control))
        if self.closeness is not None:
            k = as_rational(self.closeness)
            if k < 0:
                raise ControlError("closeness constant must be non-negative")
            object.__setattr__(self, "closeness", k)

    def __call__(self, a: Label) -> Label:
        image = self.point_map(self.source.check(self.source.canonical(a)))
        try:
            return self.target.check(self.target.canonical(image))
        except SpaceError as exc:
            raise SpaceError(f"{self.name} sends {a!r} outside the target: {exc}") from exc

    def index_map(self, n: int) -> int:
        """Target scale for scale ``n``: at least ``M(n)``, ``n + 1`` and ``K + 1``."""
        k = 0 if self.closeness is None else math.ceil(self.closeness)
        return max(self.control(n), n + 1, k + 1)

    def then(self, after: ControlledMap) -> ControlledMap:
        """``after o self`` with the composed control."""
        first, second = self.control, after.control
        if first.table is None and second.table is None:
            control = ControlFunction(first.slope * second.slope, second.slope * first.offset + second.offset)
        else:
            control = ControlFunction(table={n: second(first(n)) for n in sorted(first.table or {})})
        return ControlledMap(self.source, after.target, lambda a: after(self(a)), control,
                             None, f"{after.name}.{self.name}")

    @classmethod
    def from_json(cls, data: Mapping, source: Space, target: Space) -> ControlledMap:
        """``{"map": tag-or-pairs, "control": formula-or-table, "closeness_K": "p/q"}``."""
        spec = data["map"]
        if isinstance(spec, str):
            if spec not in BUILTIN_MAPS:
                raise SpaceError(f"unknown builtin map {spec!r}; known: {sorted(BUILTIN_MAPS)}")
            rule = BUILTIN_MAPS[spec]
            point_map = lambda a: rule(source, a)  # noqa: E731
            name = spec
        else:
            table = {source.canonical(source.label_from_json(freeze(x))):
                     target.label_from_json(freeze(y)) for x, y in spec}

            def point_map(a):
                if a not in table:
                    raise SpaceError(f"map table has no entry for {source.label_to_json(a)!r}")
                return table[a]
            name = "table"
        k = data.get("closeness_K")
        return cls(source, target, point_map, ControlFunction.parse(data.get("control", "N")),
                   None if k is None else as_rational(k), data.get("name", name))


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return rational_to_json(value)
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    return value


@dataclass
class ControlReport:
    radius: Fraction
    points: int
    control_ok: bool
    proper_ok: bool
    closeness_ok: bool | None
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.control_ok and self.proper_ok and self.closeness_ok is not False

    def to_json(self) -> dict:
        return {"radius": rational_to_json(self.radius), "points": self.points, "ok": self.ok,
                "control_ok": self.control_ok, "proper_ok": self.proper_ok,
                "closeness_ok": self.closeness_ok, "violations": [_jsonable(v) for v in self.violations]}


def validate_controlled(fmap: ControlledMap, radius: Any, partner: ControlledMap | None = None,
                        max_violations: int = 20) -> ControlReport:
    """Check the declared data of ``fmap`` on every pair in ``ball(radius)``.

    * control: ``d(f a, f b) <= M(ceil d(a, b))``;
    * properness proxy: the preimage of the target ball of radius R/4 stays
      inside the source ball of radius R/2;
    * closeness (with a partner g): ``d(g f x, x) <= K``.
    """
    radius = as_rational(radius)
    src, tgt = fmap.source, fmap.target
    points = src.ball(radius)
    images = [fmap(p) for p in points]
    violations = []
    control_ok = True
    for i, a in enumerate(points):
        for j in range(i + 1, len(points)):
            d = src.distance(a, points[j])
            bound = fmap.control.for_distance(d)
            got = tgt.distance(images[i], images[j])
            if got > bound:
                control_ok = False
                if len(violations) < max_violations:
                    violations.append(("control", a, points[j], got, bound))
    proper_ok = True
    for a, b in zip(points, images):
        if tgt.norm(b) <= radius / 4 and src.norm(a) > radius / 2:
            proper_ok = False
            if len(violations) < max_violations:
                violations.append(("proper", a, b))
    closeness_ok = None
    if partner is not None:
        k = fmap.closeness
        if k is None:
            raise ControlError("checking a partner needs a declared closeness constant")
        closeness_ok = True
        for a, b in zip(points, images):
            back = partner(b)
            if src.distance(back, a) > k:
                closeness_ok = False
                if len(violations) < max_violations:
                    violations.append(("closeness", a, back, src.distance(back, a), k))
    return ControlReport(radius, len(points), control_ok, proper_ok, closeness_ok, violations)


# -- induced morphisms ---------------------------------------------------------------

def _push(path: Sequence[Label], fmap: ControlledMap, prepend: Label | None) -> tuple:
    image = tuple(fmap(p) for p in path)
    return image if prepend is None else (prepend,) + image


def induced_morphism(fmap: ControlledMap, source: SigmaWindow, target: SigmaWindow,
                     direction: str = "forward",
                     index_map: Callable[[int], int] | None = None) -> Morphism:
    """Level maps ``sigma_N(X) -> sigma_{u(N)}(Y)`` from pushing class representatives.

    ``forward`` pushes ``x_0, x_1, ...`` to ``f x_0, f x_1, ...``; ``partner``
    prepends the target basepoint, giving ``y_0, f x_0, f x_1, ...``.  Levels
    whose target scale lies outside the target window are left out.
    """
    if direction not in ("forward", "partner"):
        raise ValueError(f"direction must be 'forward' or 'partner', got {direction!r}")
    u = index_map or fmap.index_map
    prepend = target.space.basepoint if direction == "partner" else None
    index, maps = {}, {}
    for n, level in sorted(source.levels.items()):
        m = u(n)
        if m not in target.levels:
            continue
        upper = target.levels[m]
        table = {}
        for c in level.classes:
            image = _push(c.representative, fmap, prepend)
            if not is_n_sequence(image, m, target.space):
                raise TruncationMismatchError(
                    f"image of the scale-{n} representative {c.representative!r} "
                    f"is not a {m}-sequence")
            try:
                table[c.id] = upper.locate(image)
            except TruncationMismatchError as exc:
                raise TruncationMismatchError(
                    f"scale-{n} class {c.id!r} (representative {c.representative!r}): {exc}") from exc
        index[n], maps[n] = m, table
    return Morphism(index, maps)


@dataclass
class EquivalenceVerification:
    forward: Morphism
    backward: Morphism
    source_window: SigmaWindow
    target_window: SigmaWindow
    forward_check: MorphismReport
    backward_check: MorphismReport
    equivalence: EquivalenceReport
    witnesses: list = field(default_factory=list)
    witness_failures: list = field(default_factory=list)

    @property
    def status(self) -> str:
        if not (self.forward_check.ok and self.backward_check.ok) or self.witness_failures:
            return "fail"
        return self.equivalence.status

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "source_window": [self.source_window.start, self.source_window.stop],
            "target_window": [self.target_window.start, self.target_window.stop],
            "source_sizes": list(self.source_window.sizes()),
            "target_sizes": list(self.target_window.sizes()),
            "forward": _morphism_json(self.forward, self.source_window, self.target_window),
            "backward": _morphism_json(self.backward, self.target_window, self.source_window),
            "forward_commutes": self.forward_check.ok,
            "backward_commutes": self.backward_check.ok,
            "equivalence": self.equivalence.to_json(),
            "interleaving_witnesses": len(self.witnesses),
            "witness_failures": [_jsonable(w) for w in self.witness_failures],
        }


def _morphism_json(m: Morphism, source: SigmaWindow, target: SigmaWindow) -> dict:
    enc_s, enc_t = source.space.label_to_json, target.space.label_to_json
    return {
        "index_map": {str(n): m.u(n) for n in m.levels},
        "maps": {str(n): [[enc_s(x), enc_t(y)] for x, y in sorted(m.maps[n].items(), key=lambda kv: source.space.sort_key(kv[0]))]
                 for n in m.levels},
    }


def interleave(path: Sequence[Label], round_trip: Callable[[Label], Label]) -> tuple:
    """``x_0, h x_0, x_0, x_1, h x_1, x_1, ...``: a supersequence of both paths."""
    out = []
    for p in path:
        out.extend((p, round_trip(p), p))
    return tuple(out)


def _check_witnesses(window: SigmaWindow, levels: Sequence[int], there: ControlledMap,
                     back: ControlledMap, closeness: Fraction, report: EquivalenceVerification,
                     side: str) -> None:
    space = window.space
    for n in levels:
        for c in window.levels[n].classes:
            path = c.representative
            round_trip = tuple(back(there(p)) for p in path)
            sup = interleave(path, lambda p: back(there(p)))
            scale = max(n, math.ceil(closeness))
            ok = (is_subsequence(path, sup) and is_subsequence(round_trip, sup)
                  and is_n_sequence(sup, scale, space))
            report.witnesses.append((side, n, c.id, sup))
            if not ok:
                report.witness_failures.append((side, n, c.id))


def _window_tops(f: ControlledMap, g: ControlledMap, hi: int) -> tuple[int, int]:
    # every level checked on either side must have its composite inside the windows
    top_x = max(hi, max(g.index_map(m) for m in range(1, max(hi, f.index_map(hi)) + 1)))
    top_y = max(hi, max(f.index_map(n) for n in range(1, max(hi, g.index_map(hi)) + 1)))
    top_x = max(top_x, g.index_map(top_y))
    top_y = max(top_y, f.index_map(top_x))
    return top_x, top_y


def verify_coarse_equivalence(f: ControlledMap, g: ControlledMap, window: tuple[int, int],
                              truncation_x: TruncationParams, truncation_y: TruncationParams,
                              extend: bool = True) -> EquivalenceVerification:
    """Induced morphisms of ``f: X -> Y`` and ``g: Y -> X`` and both composite laws.

    Levels ``window`` are checked on both sides; with ``extend`` the computed
    windows are widened far enough that every required composite is inside
    them.  ``f`` is pushed forward, ``g`` in partner direction.
    """
    lo, hi = window
    if f.closeness is None or g.closeness is None:
        raise ControlError("both maps need declared closeness constants")
    top_x, top_y = _window_tops(f, g, hi) if extend else (hi, hi)
    wx = ind_sigma(f.source, (lo, top_x), truncation_x)
    wy = ind_sigma(f.target, (lo, top_y), truncation_y)
    forward = induced_morphism(f, wx, wy, "forward")
    backward = induced_morphism(g, wy, wx, "partner")
    sx, sy = wx.to_direct_sequence(), wy.to_direct_sequence()
    report = EquivalenceVerification(
        forward, backward, wx, wy,
        check_morphism(forward, sx, sy), check_morphism(backward, sy, sx),
        check_equivalence(forward, backward, sx, sy, range(lo, hi + 1), range(lo, hi + 1)),
    )
    checked = range(lo, hi + 1)
    _check_witnesses(wx, checked, f, g, f.closeness, report, "source")
    _check_witnesses(wy, checked, g, f, g.closeness, report, "target")
    return report


# -- basepoint change ----------------------------------------------------------------

@dataclass
class RebaseResult:
    shift: int
    old_window: SigmaWindow
    new_window: SigmaWindow
    forward: Morphism
    backward: Morphism
    equivalence: EquivalenceReport

    @property
    def old_sequence(self) -> ConcreteSequence:
        return self.old_window.to_direct_sequence()

    @property
    def new_sequence(self) -> ConcreteSequence:
        return self.new_window.to_direct_sequence()

    def to_json(self) -> dict:
        return {
            "shift": self.shift,
            "old_sizes": list(self.old_window.sizes()),
            "new_sizes": list(self.new_window.sizes()),
            "forward": _morphism_json(self.forward, self.old_window, self.new_window),
            "backward": _morphism_json(self.backward, self.new_window, self.old_window),
            "equivalence": self.equivalence.to_json(),
        }


def _prepend_morphism(source: SigmaWindow, target: SigmaWindow, shift: int) -> Morphism:
    """Send ``[x_0, x_1, ...]_N`` to ``[y_0, x_0, x_1, ...]_{max(N, M)}``."""
    y0 = target.space.basepoint
    index, maps = {}, {}
    for n, level in sorted(source.levels.items()):
        m = max(n, shift)
        if m not in target.levels:
            continue
        upper = target.levels[m]
        index[n] = m
        maps[n] = {c.id: upper.locate((y0,) + tuple(c.representative)) for c in level.classes}
    return Morphism(index, maps)


def rebase(space: Space, new_basepoint: Label, window: tuple[int, int],
           truncation: TruncationParams) -> RebaseResult:
    """Morphisms between the sigma windows at the old and the new basepoint.

    With ``M = ceil d(x_0, y_0)`` both directions prepend the other basepoint
    and move level N to level ``max(N, M)``.
    """
    lo, hi = window
    moved = Rebased(space, new_basepoint)
    d = space.distance(space.basepoint, moved.basepoint)
    shift = math.ceil(d)
    if shift > hi:
        raise ThinTruncationError(
            f"window top {hi} is below M = {shift}; the composites cannot be checked")
    inner = truncation.inner_radius if truncation.inner_radius is not None else Fraction(hi)
    margin = truncation.witness_margin if truncation.witness_margin is not None else Fraction(hi + 1)
    if truncation.outer_radius - margin <= inner + shift:
        raise ThinTruncationError(
            f"R - W = {truncation.outer_radius - margin} does not clear r + M = {inner + shift}")
    # the ball around y_0 must swallow the old inner ball, or ends merge near x_0
    moved_truncation = TruncationParams(truncation.outer_radius, inner + shift, truncation.witness_margin)
    moved_truncation.resolve(hi).check_thickness()
    old = ind_sigma(space, (lo, hi), TruncationParams(truncation.outer_radius, inner, truncation.witness_margin))
    new = ind_sigma(moved, (lo, hi), moved_truncation)
    forward = _prepend_morphism(old, new, shift)
    backward = _prepend_morphism(new, old, shift)
    eq = check_equivalence(forward, backward, old.to_direct_sequence(), new.to_direct_sequence())
    return RebaseResult(shift, old, new, forward, backward, eq)
