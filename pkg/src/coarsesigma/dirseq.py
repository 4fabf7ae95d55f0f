"""Direct sequences of sets, reindexing morphisms, and direct limits.

Two representations are supported:

* :class:`ConcreteSequence` -- a finite window ``X_i0 .. X_i1`` of finite sets
  with explicit bonding tables;
* :class:`SymbolicSequence` -- levels ``{1, ..., size(N)}`` (size a constant,
  an affine function of N, or omega) with identity or prefix-inclusion
  bondings, or one uniform table.

Morphisms ``f_i : X_i -> Y_u(i)`` are checked against the commutation law on
a window; equivalences are verified from a supplied pair, never decided.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from .unionfind import UnionFind


class DirectSequenceError(ValueError):
    pass


class WindowError(DirectSequenceError):
    """Indices fall outside the available window."""


# -- cardinals ---------------------------------------------------------------

@functools.total_ordering
class _Omega:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "omega"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("omega")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self


OMEGA = _Omega()
Cardinal = "int | _Omega"


def cardinal_to_json(c) -> Any:
    return "omega" if c is OMEGA else c


# -- set functions ------------------------------------------------------------

def freeze(value: Any) -> Hashable:
    """JSON value -> hashable element (lists become tuples)."""
    if isinstance(value, list):
        return tuple(freeze(v) for v in value)
    return value


def thaw(value: Any) -> Any:
    if isinstance(value, tuple):
        return [thaw(v) for v in value]
    return value


@dataclass(frozen=True, eq=False)
class SetMap:
    """A total function between two finite ordered sets."""

    domain: tuple
    codomain: tuple
    table: Mapping

    def __post_init__(self) -> None:
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "codomain", tuple(self.codomain))
        object.__setattr__(self, "table", dict(self.table))
        missing = [x for x in self.domain if x not in self.table]
        if missing:
            raise DirectSequenceError(f"function not total: no value at {missing[:3]}")
        codomain = set(self.codomain)
        stray = [self.table[x] for x in self.domain if self.table[x] not in codomain]
        if stray:
            raise DirectSequenceError(f"values outside codomain: {stray[:3]}")

    @classmethod
    def identity(cls, level: Sequence) -> SetMap:
        return cls(level, level, {x: x for x in level})

    def __call__(self, x):
        return self.table[x]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetMap):
            return NotImplemented
        return (set(self.domain) == set(other.domain)
                and set(self.codomain) == set(other.codomain)
                and all(self.table[x] == other.table[x] for x in self.domain))

    __hash__ = None

    def then(self, after: SetMap) -> SetMap:
        """``after o self``."""
        return SetMap(self.domain, after.codomain, {x: after(self(x)) for x in self.domain})

    def image(self) -> frozenset:
        return frozenset(self.table[x] for x in self.domain)

    def image_size(self) -> int:
        return len(self.image())

    def is_injective(self) -> bool:
        return len(self.image()) == len(self.domain)

    def is_surjective(self) -> bool:
        return self.image() == frozenset(self.codomain)

    def is_bijective(self) -> bool:
        return self.is_injective() and self.is_surjective()


@dataclass(frozen=True)
class NatMap:
    """``x -> x`` from ``{1..src}`` into ``{1..dst}`` (``src <= dst``)."""

    src: Any
    dst: Any

    def __call__(self, x: int) -> int:
        if not isinstance(x, int) or not (1 <= x and (self.src is OMEGA or x <= self.src)):
            raise DirectSequenceError(f"{x!r} not in {{1..{self.src}}}")
        return x

    def then(self, after: NatMap) -> NatMap:
        return NatMap(self.src, after.dst)

    def image_size(self):
        return self.src

    def is_injective(self) -> bool:
        return True

    def is_surjective(self) -> bool:
        return self.src == self.dst

    def is_bijective(self) -> bool:
        return self.src == self.dst

    @property
    def is_identity(self) -> bool:
        return self.src == self.dst

    def describe(self) -> str:
        if self.is_identity:
            return f"identity on {{1..{self.src}}}"
        return f"inclusion {{1..{self.src}}} -> {{1..{self.dst}}}"


# -- sequences ------------------------------------------------------------------

class ConcreteSequence:
    """Finite window ``X_start .. X_stop`` with bondings ``X_i -> X_{i+1}``."""

    def __init__(self, start: int, levels: Sequence[Sequence], bondings: Sequence[Mapping]) -> None:
        if not levels:
            raise DirectSequenceError("a window needs at least one level")
        if len(bondings) != len(levels) - 1:
            raise DirectSequenceError(
                f"{len(levels)} levels need {len(levels) - 1} bondings, got {len(bondings)}")
        self.start = start
        self.levels = tuple(tuple(level) for level in levels)
        for k, level in enumerate(self.levels):
            if len(set(level)) != len(level):
                raise DirectSequenceError(f"level {start + k} has repeated elements")
        self.bondings = tuple(
            SetMap(self.levels[k], self.levels[k + 1], b) for k, b in enumerate(bondings))
        self._composites: dict = {}

    @property
    def stop(self) -> int:
        return self.start + len(self.levels) - 1

    @property
    def indices(self) -> range:
        return range(self.start, self.stop + 1)

    def has_level(self, i: int) -> bool:
        return self.start <= i <= self.stop

    def level(self, i: int) -> tuple:
        if not self.has_level(i):
            raise WindowError(f"level {i} outside window {self.start}..{self.stop}")
        return self.levels[i - self.start]

    def size(self, i: int) -> int:
        return len(self.level(i))

    def bond(self, i: int, j: int) -> SetMap:
        """The composite bonding ``phi_{ij} : X_i -> X_j`` (identity when i == j)."""
        if i > j:
            raise WindowError(f"no bonding from level {i} down to level {j}")
        self.level(i)
        self.level(j)
        key = (i, j)
        out = self._composites.get(key)
        if out is None:
            if i == j:
                out = SetMap.identity(self.level(i))
            else:
                out = self.bond(i, j - 1).then(self.bondings[j - 1 - self.start])
            self._composites[key] = out
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConcreteSequence):
            return NotImplemented
        return (self.start == other.start and self.levels == other.levels
                and all(a == b for a, b in zip(self.bondings, other.bondings)))

    __hash__ = None

    def to_json(self) -> dict:
        return {
            "type": "concrete",
            "start": self.start,
            "levels": [[thaw(x) for x in level] for level in self.levels],
            "bondings": [[[thaw(x), thaw(b(x))] for x in b.domain] for b in self.bondings],
        }


_SIZE_RE = re.compile(r"^\s*(?:(?P<a>\d*)\s*\*?\s*N)?\s*(?:(?P<sign>[+-])?\s*(?P<b>\d+))?\s*$")


@dataclass(frozen=True)
class SizeFormula:
    """``omega``, a constant ``b``, or ``a*N + b``."""

    slope: int = 0
    offset: int = 0
    omega: bool = False

    @classmethod
    def parse(cls, text: Any) -> SizeFormula:
        if isinstance(text, int) and not isinstance(text, bool):
            return cls(0, text)
        if not isinstance(text, str):
            raise DirectSequenceError(f"size formula must be a string, got {text!r}")
        if text.strip().lower() in ("omega", "ω"):
            return cls(omega=True)
        m = _SIZE_RE.match(text)
        if not m or not text.strip():
            raise DirectSequenceError(f"unsupported size formula {text!r}")
        has_n = "N" in text
        slope = (int(m["a"]) if m["a"] else 1) if has_n else 0
        offset = int(m["b"] or 0) * (-1 if m["sign"] == "-" else 1)
        return cls(slope, offset)

    def __call__(self, n: int):
        if self.omega:
            return OMEGA
        value = self.slope * n + self.offset
        if value < 0:
            raise DirectSequenceError(f"size {value} < 0 at level {n}")
        return value

    @property
    def bounded(self) -> bool:
        return not self.omega and self.slope == 0

    def __str__(self) -> str:
        if self.omega:
            return "omega"
        if self.slope == 0:
            return str(self.offset)
        head = "N" if self.slope == 1 else f"{self.slope}N"
        if self.offset:
            return f"{head}{'+' if self.offset > 0 else '-'}{abs(self.offset)}"
        return head


class SymbolicSequence:
    """Levels ``{1..size(N)}`` for every ``N >= start``."""

    BONDINGS = ("identity", "inclusion", "table")

    def __init__(self, size: SizeFormula | str, bonding: str = "identity",
                 table: Mapping[int, int] | None = None, start: int = 1) -> None:
        self.size_formula = size if isinstance(size, SizeFormula) else SizeFormula.parse(size)
        if bonding not in self.BONDINGS:
            raise DirectSequenceError(f"unknown bonding descriptor {bonding!r}")
        self.bonding = bonding
        self.start = start
        f = self.size_formula
        if bonding == "identity" and not (f.omega or f.slope == 0):
            raise DirectSequenceError("identity bondings need a constant size")
        if bonding == "inclusion" and f.slope < 0:
            raise DirectSequenceError("prefix inclusions need non-decreasing sizes")
        if bonding == "table":
            if not f.bounded:
                raise DirectSequenceError("a uniform bonding table needs a finite constant size")
            table = {int(k): int(v) for k, v in (table or {}).items()}
            n = f.offset
            if set(table) != set(range(1, n + 1)) or not set(table.values()) <= set(range(1, n + 1)):
                raise DirectSequenceError(f"bonding table must map {{1..{n}}} into itself")
        self.table = table

    def has_level(self, i: int) -> bool:
        return i >= self.start

    def size(self, i: int):
        if not self.has_level(i):
            raise WindowError(f"level {i} below start {self.start}")
        return self.size_formula(i)

    def level(self, i: int) -> tuple:
        n = self.size(i)
        if n is OMEGA:
            raise DirectSequenceError("cannot enumerate an infinite level")
        return tuple(range(1, n + 1))

    def bond(self, i: int, j: int):
        if i > j:
            raise WindowError(f"no bonding from level {i} down to level {j}")
        if self.bonding == "table":
            level = self.level(i)
            out = SetMap.identity(level)
            step = SetMap(level, level, self.table)
            for _ in range(j - i):
                out = out.then(step)
            return out
        return NatMap(self.size(i), self.size(j))

    def window(self, lo: int, hi: int) -> ConcreteSequence:
        """Materialize levels ``lo..hi`` (finite sizes only)."""
        levels = [self.level(i) for i in range(lo, hi + 1)]
        bondings = [{x: self.bond(i, i + 1)(x) for x in levels[i - lo]} for i in range(lo, hi)]
        return ConcreteSequence(lo, levels, bondings)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolicSequence):
            return NotImplemented
        return (self.size_formula == other.size_formula and self.bonding == other.bonding
                and self.table == other.table and self.start == other.start)

    __hash__ = None

    def to_json(self) -> dict:
        out = {"type": "symbolic", "start": self.start, "size": str(self.size_formula),
               "bonding": self.bonding}
        if self.bonding == "table":
            out["table"] = {str(k): v for k, v in sorted(self.table.items())}
        return out


DirectSequence = "ConcreteSequence | SymbolicSequence"


def sequence_from_json(data: Mapping) -> ConcreteSequence | SymbolicSequence:
    kind = data.get("type")
    if kind == "concrete":
        levels = [[freeze(x) for x in level] for level in data["levels"]]
        bondings = [{freeze(x): freeze(y) for x, y in pairs} for pairs in data["bondings"]]
        return ConcreteSequence(int(data.get("start", 1)), levels, bondings)
    if kind == "symbolic":
        return SymbolicSequence(str(data["size"]), data.get("bonding", "identity"),
                                table=data.get("table"), start=int(data.get("start", 1)))
    raise DirectSequenceError(f"unknown direct sequence type {kind!r}")


def compose_bonding(seq, i: int, j: int):
    """phi_{ij}, the composite of the bondings from level i up to level j."""
    return seq.bond(i, j)


# -- morphisms ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Morphism:
    """Level functions ``f_i : X_i -> Y_{u(i)}`` for source levels ``i`` in ``maps``."""

    index_map: Mapping[int, int]
    maps: Mapping[int, Mapping]

    def __post_init__(self) -> None:
        object.__setattr__(self, "index_map", dict(self.index_map))
        object.__setattr__(self, "maps", {i: dict(m) for i, m in self.maps.items()})
        if set(self.index_map) != set(self.maps):
            raise DirectSequenceError("index map and level functions cover different levels")

    @property
    def levels(self) -> list[int]:
        return sorted(self.maps)

    def u(self, i: int) -> int:
        return self.index_map[i]

    def apply(self, i: int, x):
        return self.maps[i][x]

    def to_json(self) -> dict:
        return {
            "index_map": {str(i): self.index_map[i] for i in self.levels},
            "maps": {str(i): [[thaw(x), thaw(y)] for x, y in self.maps[i].items()] for i in self.levels},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> Morphism:
        index_map = {int(i): int(u) for i, u in data["index_map"].items()}
        maps = {int(i): {freeze(x): freeze(y) for x, y in pairs} for i, pairs in data["maps"].items()}
        return cls(index_map, maps)


def identity_morphism(seq: ConcreteSequence) -> Morphism:
    return Morphism({i: i for i in seq.indices}, {i: {x: x for x in seq.level(i)} for i in seq.indices})


def bonding_morphism(seq: ConcreteSequence, shift: Callable[[int], int]) -> Morphism:
    """``phi_{i, shift(i)}`` for every level where the target is in the window."""
    levels = [i for i in seq.indices if seq.has_level(shift(i)) and shift(i) >= i]
    return Morphism({i: shift(i) for i in levels},
                    {i: dict(seq.bond(i, shift(i)).table) for i in levels})


def compose_morphisms(first: Morphism, second: Morphism) -> Morphism:
    """``second o first``: level i goes to ``second.u(first.u(i))``."""
    levels = [i for i in first.levels if first.u(i) in second.maps]
    return Morphism(
        {i: second.u(first.u(i)) for i in levels},
        {i: {x: second.apply(first.u(i), y) for x, y in first.maps[i].items()} for i in levels},
    )


@dataclass
class MorphismReport:
    ok: bool
    violations: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": [list(map(thaw, v)) for v in self.violations],
                "errors": self.errors}


def check_morphism(m: Morphism, source: ConcreteSequence, target: ConcreteSequence) -> MorphismReport:
    """Check ``psi_{u(i),k} f_i = psi_{u(j),k} f_j phi_{ij}`` for i < j, k = max(u(i), u(j)).

    For non-decreasing ``u`` this is the usual ``psi_{u(i)u(j)} f_i = f_j phi_{ij}``.
    Violations are reported as ``(i, j, x, lhs, rhs)``.
    """
    errors = []
    for i in m.levels:
        if not source.has_level(i):
            errors.append(f"level {i} not in source window")
            continue
        if not target.has_level(m.u(i)):
            errors.append(f"u({i}) = {m.u(i)} not in target window")
            continue
        fi = m.maps[i]
        dom, cod = set(source.level(i)), set(target.level(m.u(i)))
        if set(fi) != dom:
            errors.append(f"f_{i} is not defined on exactly X_{i}")
        if not set(fi.values()) <= cod:
            errors.append(f"f_{i} leaves Y_{m.u(i)}")
    if errors:
        return MorphismReport(False, [], errors)
    violations = []
    levels = m.levels
    for a, i in enumerate(levels):
        for j in levels[a + 1:]:
            ui, uj = m.u(i), m.u(j)
            k = max(ui, uj)
            push_i, push_j = target.bond(ui, k), target.bond(uj, k)
            phi = source.bond(i, j)
            for x in source.level(i):
                lhs = push_i(m.apply(i, x))
                rhs = push_j(m.apply(j, phi(x)))
                if lhs != rhs:
                    violations.append((i, j, x, lhs, rhs))
    return MorphismReport(not violations, violations)


def normalize_morphism(m: Morphism, source: ConcreteSequence, target: ConcreteSequence) -> Morphism:
    """Rewrite ``m`` so that ``u(i) >= i`` and ``u`` is strictly increasing.

    Both rewrites post-compose a level function with target bondings:
    ``f'_i = psi_{u(i), i} f_i`` where ``u(i) < i``, then
    ``f'_j = psi_{u(j), u'(j)} f_j`` with ``u'(j) = u'(prev) + 1`` wherever the
    index map fails to increase.
    """
    index_map, maps = {}, {}
    prev = None
    for i in m.levels:
        new_u = max(m.u(i), i)
        if prev is not None and new_u <= prev:
            new_u = prev + 1
        if not target.has_level(new_u):
            raise WindowError(
                f"cannot push level {i} up to target level {new_u}: "
                f"target window ends at {target.stop}")
        push = target.bond(m.u(i), new_u)
        index_map[i] = new_u
        maps[i] = {x: push(y) for x, y in m.maps[i].items()}
        prev = new_u
    return Morphism(index_map, maps)


@dataclass
class EquivalenceReport:
    status: str  # "pass" | "fail" | "inconclusive"
    checked: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "checked": [list(c) for c in self.checked],
            "skipped": [list(s) for s in self.skipped],
            "violations": [list(map(thaw, v)) for v in self.violations],
        }


def _composite_law(f: Morphism, g: Morphism, a: ConcreteSequence, levels, side: str,
                   report: EquivalenceReport) -> None:
    for i in levels:
        if i not in f.maps:
            report.skipped.append((side, i, "first map undefined"))
            continue
        ui = f.u(i)
        if ui not in g.maps:
            report.skipped.append((side, i, f"second map undefined at level {ui}"))
            continue
        back = g.u(ui)
        top = max(i, back)
        if not (a.has_level(i) and a.has_level(top)):
            report.skipped.append((side, i, f"level {top} outside window"))
            continue
        push = a.bond(back, top)
        phi = a.bond(i, top)
        report.checked.append((side, i))
        for x in a.level(i):
            lhs = push(g.apply(ui, f.apply(i, x)))
            rhs = phi(x)
            if lhs != rhs:
                report.violations.append((side, i, x, lhs, rhs))


def check_equivalence(f: Morphism, g: Morphism, source: ConcreteSequence, target: ConcreteSequence,
                      source_levels: Iterable[int] | None = None,
                      target_levels: Iterable[int] | None = None) -> EquivalenceReport:
    """Verify ``g_{u(i)} f_i = phi_{i, v(u(i))}`` and ``f_{v(i)} g_i = psi_{i, u(v(i))}``.

    Levels default to the full windows.  A required composite that needs a
    level outside the windows makes the verdict ``inconclusive`` unless some
    law fails outright.
    """
    report = EquivalenceReport("pass")
    _composite_law(f, g, source, source.indices if source_levels is None else source_levels,
                   "source", report)
    _composite_law(g, f, target, target.indices if target_levels is None else target_levels,
                   "target", report)
    if report.violations:
        report.status = "fail"
    elif report.skipped:
        report.status = "inconclusive"
    return report


# -- direct limits ------------------------------------------------------------------

@dataclass(frozen=True)
class LimitSet:
    """Classes of the disjoint union of window levels; members are ``(level, x)``."""

    classes: tuple
    class_of: Mapping

    @property
    def cardinality(self) -> int:
        return len(self.classes)

    def representative(self, k: int) -> tuple:
        return self.classes[k][0]

    def to_json(self) -> dict:
        return {
            "cardinality": self.cardinality,
            "classes": [{"representative": [lvl, thaw(x)], "size": len(c)}
                        for c in self.classes for lvl, x in [c[0]]],
        }


@dataclass(frozen=True)
class SymbolicLimit:
    cardinality: Any
    description: str

    def to_json(self) -> dict:
        return {"cardinality": cardinal_to_json(self.cardinality), "description": self.description}


def direct_limit(seq):
    """Direct limit: the disjoint union modulo eventual agreement of forward images."""
    if isinstance(seq, SymbolicSequence):
        f = seq.size_formula
        if seq.bonding == "identity":
            return SymbolicLimit(f(seq.start), f"the constant level {{1..{f}}}")
        if seq.bonding == "inclusion":
            card = f(seq.start) if f.bounded else OMEGA
            return SymbolicLimit(card, "union of the prefix levels")
        raise DirectSequenceError("direct limit of a table-bonded symbolic sequence is not supported")
    members = [(i, x) for i in seq.indices for x in seq.level(i)]
    pos = {m: k for k, m in enumerate(members)}
    uf = UnionFind(len(members))
    for i in seq.indices[:-1]:
        b = seq.bondings[i - seq.start]
        for x in b.domain:
            uf.union(pos[(i, x)], pos[(i + 1, b(x))])
    groups = uf.groups()
    classes = tuple(tuple(members[k] for k in g) for _, g in sorted(groups.items()))
    class_of = {m: c for c, group in enumerate(classes) for m in group}
    return LimitSet(classes, class_of)


@dataclass
class LimitMap:
    table: dict
    well_defined: bool
    conflicts: list
    undefined: list

    def __call__(self, k: int) -> int:
        return self.table[k]

    def is_bijective(self, codomain_size: int) -> bool:
        return (not self.undefined and len(set(self.table.values())) == len(self.table)
                and len(self.table) == codomain_size)


def induced_limit_map(m: Morphism, source: ConcreteSequence, target: ConcreteSequence,
                      source_limit: LimitSet | None = None,
                      target_limit: LimitSet | None = None) -> LimitMap:
    """``[x_i] -> [f_i(x_i)]``, checked on every member where f is defined."""
    src = source_limit or direct_limit(source)
    tgt = target_limit or direct_limit(target)
    table: dict = {}
    conflicts, undefined = [], []
    for k, members in enumerate(src.classes):
        images = set()
        for i, x in members:
            if i in m.maps and target.has_level(m.u(i)):
                images.add(tgt.class_of[(m.u(i), m.apply(i, x))])
        if not images:
            undefined.append(k)
            continue
        if len(images) > 1:
            conflicts.append((k, sorted(images)))
        table[k] = min(images)
    return LimitMap(table, not conflicts, conflicts, undefined)


def limit_maps_inverse(fmap: LimitMap, gmap: LimitMap, source: LimitSet, target: LimitSet) -> bool:
    """True when the two induced maps compose to the identity in both orders."""
    if fmap.undefined or gmap.undefined or not (fmap.well_defined and gmap.well_defined):
        return False
    return (all(gmap(fmap(k)) == k for k in range(source.cardinality))
            and all(fmap(gmap(k)) == k for k in range(target.cardinality)))


# -- cardinality obstruction ------------------------------------------------------

@dataclass(frozen=True)
class ObstructionVerdict:
    verdict: str  # "not_equivalent" | "inconclusive"
    level: int | None = None
    image_cardinality: Any = None
    bound: Any = None
    reason: str = ""

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "level": self.level,
                "image_cardinality": cardinal_to_json(self.image_cardinality),
                "bound": cardinal_to_json(self.bound) if not isinstance(self.bound, str) else self.bound,
                "reason": self.reason}


def _stable_images(seq):
    """Yield ``(N, c_N)`` with ``c_N = inf_{L >= N} |image phi_{N,L}|``."""
    if isinstance(seq, ConcreteSequence):
        for i in seq.indices:
            yield i, seq.bond(i, seq.stop).image_size()
        return
    f = seq.size_formula
    if seq.bonding in ("identity", "inclusion"):
        if f.bounded or f.omega:
            yield seq.start, f(seq.start)
        else:
            # injective bondings: c_N = size(N), unbounded
            yield seq.start, ("unbounded", f)
        return
    level = seq.level(seq.start)
    step = SetMap(level, level, seq.table)
    image = frozenset(level)
    for _ in range(len(level) + 1):
        image = frozenset(step(x) for x in image)
    yield seq.start, len(image)


def _level_bound(seq):
    """``(sup of level sizes, attained)``."""
    if isinstance(seq, ConcreteSequence):
        return max(seq.size(i) for i in seq.indices), True
    f = seq.size_formula
    if f.omega:
        return OMEGA, True
    if f.bounded:
        return f.offset, True
    return OMEGA, False


def cardinality_obstruction(a, b) -> ObstructionVerdict:
    """``not_equivalent`` when some level of ``a`` keeps more elements under all
    later bondings than any single level of ``b`` has; otherwise ``inconclusive``.

    Any equivalence would factor ``phi^a_{N, L}`` through a level of ``b``, so
    the image would be no larger than that level.
    """
    bound, attained = _level_bound(b)
    for n, c in _stable_images(a):
        if isinstance(c, tuple):
            formula = c[1]
            if bound is OMEGA:
                continue
            # smallest level whose size exceeds the bound
            level = max(n, -(-(bound + 1 - formula.offset) // formula.slope))
            return ObstructionVerdict("not_equivalent", level, formula(level), bound,
                                      f"images grow without bound; every level of the other has size <= {bound}")
        if attained:
            fires = c > bound
        else:
            fires = c is OMEGA
        if fires:
            shown = bound if attained else "finite (unbounded)"
            return ObstructionVerdict(
                "not_equivalent", n, c, shown,
                f"phi_{{{n},L}} keeps {c!r} elements for every L, more than any level of the other")
    return ObstructionVerdict("inconclusive", reason="no level of the first sequence outgrows the second")
