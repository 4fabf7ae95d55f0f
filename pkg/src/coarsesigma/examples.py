"""Named end-to-end pipelines with their expected outcomes and stored goldens.

``run_example(name)`` executes one pipeline, compares the computed
quantities with the expected ones, and returns a report whose ``result``
is plain JSON.  Goldens under ``goldens/v1`` hold those results; they are
regenerated with ``scripts/regenerate_goldens.py`` and must come out
byte-identical.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from .dirseq import (OMEGA, SymbolicSequence, cardinal_to_json, cardinality_obstruction, direct_limit)
from .functor import BUILTIN_MAPS, ControlledMap, rebase, verify_coarse_equivalence
from .rips import TruncationParams
from .sigma import ind_sigma, sigma_stability
from .space import PointCloud, Space, discrete_open_book, integer_line, Line, open_book

GOLDEN_DIR = Path(__file__).parent / "goldens" / "v1"


@dataclass
class Check:
    quantity: str
    expected: Any
    actual: Any

    @property
    def ok(self) -> bool:
        return self.expected == self.actual

    def to_json(self) -> dict:
        return {"quantity": self.quantity, "expected": self.expected, "actual": self.actual, "ok": self.ok}


@dataclass
class ExampleReport:
    name: str
    params: dict
    checks: list
    result: dict
    golden: str = "not compared"  # "match" | "mismatch" | "missing" | "not compared"
    golden_diff: list = field(default_factory=list)

    @property
    def first_divergence(self) -> Check | None:
        return next((c for c in self.checks if not c.ok), None)

    @property
    def ok(self) -> bool:
        return self.first_divergence is None and self.golden in ("match", "not compared")

    def to_json(self) -> dict:
        bad = self.first_divergence
        return {
            "name": self.name,
            "params": self.params,
            "ok": self.ok,
            "checks": [c.to_json() for c in self.checks],
            "first_divergence": None if bad is None else bad.quantity,
            "golden": self.golden,
            "golden_diff": self.golden_diff,
        }


@dataclass(frozen=True)
class PaperExample:
    name: str
    defaults: dict
    runner: Callable[[dict], tuple[list, dict]]
    description: str


def _bonding_shape(window) -> list:
    shapes = []
    for n, b in sorted(window.bondings.items()):
        if all(b(x) == x for x in b.domain) and b.is_injective():
            shapes.append("identity" if b.is_surjective() else "inclusion")
        else:
            shapes.append("bijection" if b.is_bijective() else "other")
    return shapes


def _window_pipeline(space: Space, p: dict, sizes: list, shape: str, verdict: str):
    trunc = TruncationParams(p["R"])
    window = ind_sigma(space, tuple(p["window"]), trunc)
    stability = sigma_stability(window).to_json()
    actual_shapes = _bonding_shape(window)
    checks = [
        Check("level sizes", sizes, list(window.sizes())),
        Check("bonding shape", shape, actual_shapes[0] if len(set(actual_shapes)) == 1 else actual_shapes),
        Check("stability verdict", verdict, stability["verdict"]),
    ]
    return checks, window.to_json()


def _discrete_open_book(p: dict):
    lo, hi = p["window"]
    return _window_pipeline(discrete_open_book(p["num_rays"]), p,
                            [min(n, p["num_rays"]) for n in range(lo, hi + 1)],
                            "inclusion", "not stable within window")


def _open_book(p: dict):
    lo, hi = p["window"]
    return _window_pipeline(open_book(p["num_rays"], Fraction(p["net_spacing"])), p,
                            [p["num_rays"]] * (hi - lo + 1), "identity", f"stable with K={lo} (window-relative)")


def _real_vs_int(p: dict):
    net, ints = Line(Fraction(p["net_spacing"])), integer_line()
    k = Fraction(p["K"])
    floor = ControlledMap(net, ints, lambda a: BUILTIN_MAPS["floor"](net, a), "N+1", k, "floor")
    inclusion = ControlledMap(ints, net, lambda a: a, "N", k, "inclusion")
    trunc = TruncationParams(p["R"])
    report = verify_coarse_equivalence(floor, inclusion, tuple(p["window"]), trunc, trunc)
    out = report.to_json()
    checks = [
        Check("forward commutes with bondings", True, out["forward_commutes"]),
        Check("backward commutes with bondings", True, out["backward_commutes"]),
        Check("composite laws", "pass", out["equivalence"]["status"]),
        Check("interleaving witnesses valid", [], out["witness_failures"]),
        Check("ends of the line", 2, out["source_sizes"][0]),
    ]
    return checks, out


def _rebase_demo(p: dict):
    space = discrete_open_book(p["num_rays"])
    ray, t = p["new_basepoint"]
    res = rebase(space, (ray, Fraction(t)), tuple(p["window"]), TruncationParams(p["R"]))
    out = res.to_json()
    lo, hi = p["window"]
    old, new = out["old_sizes"], out["new_sizes"]
    tail = [n - lo for n in range(max(lo, res.shift), hi + 1)]
    checks = [
        Check("shift M", p["expected_shift"], res.shift),
        Check("composite laws", "pass", out["equivalence"]["status"]),
        Check("sizes agree from M on", [old[i] for i in tail], [new[i] for i in tail]),
    ]
    return checks, out


def _symbolic_comparison(p: dict):
    book = SymbolicSequence("omega", "identity")
    discrete = SymbolicSequence("N", "inclusion")
    forward = cardinality_obstruction(book, discrete)
    backward = cardinality_obstruction(discrete, book)
    limits = [direct_limit(book), direct_limit(discrete)]
    out = {
        "sequences": [book.to_json(), discrete.to_json()],
        "obstruction": forward.to_json(),
        "reverse_obstruction": backward.to_json(),
        "limits": [lim.to_json() for lim in limits],
    }
    checks = [
        Check("obstruction", "not_equivalent", forward.verdict),
        Check("limit cardinalities", ["omega", "omega"], [cardinal_to_json(lim.cardinality) for lim in limits]),
        Check("limits alone cannot separate", True, limits[0].cardinality == limits[1].cardinality == OMEGA),
    ]
    return checks, out


def _finite_books(p: dict):
    k = p["num_rays"]
    book, discrete = open_book(k, Fraction(p["net_spacing"])), discrete_open_book(k)
    close = Fraction(k)
    inclusion = ControlledMap(discrete, book, lambda a: a, "N", close, "inclusion")
    ray_floor = ControlledMap(book, discrete, lambda a: BUILTIN_MAPS["ray_floor"](book, a),
                              f"N+{k}", close, "ray_floor")
    trunc = TruncationParams(p["R"])
    report = verify_coarse_equivalence(inclusion, ray_floor, tuple(p["window"]), trunc, trunc)
    out = report.to_json()
    seq_d = report.source_window.to_direct_sequence()
    seq_b = report.target_window.to_direct_sequence()
    verdicts = [cardinality_obstruction(seq_b, seq_d).verdict, cardinality_obstruction(seq_d, seq_b).verdict]
    out = {"equivalence": out, "obstruction": verdicts}
    checks = [
        Check("composite laws", "pass", out["equivalence"]["equivalence"]["status"]),
        Check("verification status", "pass", out["equivalence"]["status"]),
        Check("obstruction on the windows", ["inconclusive", "inconclusive"], verdicts),
    ]
    return checks, out


EXAMPLES: dict[str, PaperExample] = {
    e.name: e for e in [
        PaperExample("discrete_open_book", {"num_rays": 25, "R": 200, "window": [1, 10]},
                     _discrete_open_book, "ray i spaced by i: one new end per scale"),
        PaperExample("open_book", {"num_rays": 10, "net_spacing": "1/2", "R": 100, "window": [1, 8]},
                     _open_book, "continuous rays: every end visible from scale 1"),
        PaperExample("real_vs_int", {"net_spacing": "1/2", "K": 1, "R": 60, "window": [1, 6]},
                     _real_vs_int, "floor and inclusion between a net of the line and Z"),
        PaperExample("rebase_demo", {"num_rays": 25, "new_basepoint": [3, 9], "expected_shift": 9,
                                     "R": 200, "window": [1, 12]},
                     _rebase_demo, "moving the basepoint of the discrete book"),
        PaperExample("symbolic_comparison", {}, _symbolic_comparison,
                     "the sequences differ although the limits agree"),
        PaperExample("finite_books", {"num_rays": 10, "net_spacing": "1/2", "R": 60, "window": [1, 2]},
                     _finite_books, "finitely many rays: the two books are equivalent"),
    ]
}


def dumps(data: Any) -> str:
    """Canonical JSON text used for goldens and reports."""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _diff(expected: Any, actual: Any, path: str = "$", out: list | None = None, limit: int = 10) -> list:
    out = [] if out is None else out
    if len(out) >= limit:
        return out
    if isinstance(expected, dict) and isinstance(actual, dict):
        for key in sorted(set(expected) | set(actual)):
            if key not in actual or key not in expected:
                out.append(f"{path}.{key}: present on one side only")
            else:
                _diff(expected[key], actual[key], f"{path}.{key}", out, limit)
    elif isinstance(expected, list) and isinstance(actual, list) and len(expected) == len(actual):
        for i, (a, b) in enumerate(zip(expected, actual)):
            _diff(a, b, f"{path}[{i}]", out, limit)
    elif expected != actual:
        out.append(f"{path}: golden {json.dumps(expected)} != computed {json.dumps(actual)}")
    return out


def run_example(name: str, params: dict | None = None, golden_dir: Path | None = GOLDEN_DIR) -> ExampleReport:
    """Run one named pipeline; goldens are compared only on default parameters."""
    if name not in EXAMPLES:
        raise KeyError(f"unknown example {name!r}; known: {', '.join(EXAMPLES)}")
    example = EXAMPLES[name]
    merged = {**example.defaults, **(params or {})}
    checks, result = example.runner(merged)
    # round-trip through JSON so the result compares equal to a loaded golden
    result = json.loads(dumps(result))
    report = ExampleReport(name, merged, checks, result)
    if golden_dir is not None and merged == example.defaults:
        path = Path(golden_dir) / f"{name}.json"
        if not path.exists():
            report.golden = "missing"
        else:
            golden = json.loads(path.read_text())
            report.golden_diff = _diff(golden, result)
            report.golden = "mismatch" if report.golden_diff else "match"
    return report


def verify_paper(names: list[str] | None = None, golden_dir: Path | None = GOLDEN_DIR) -> dict:
    """Run the named examples (all by default) and summarize."""
    selected = list(EXAMPLES) if not names else names
    reports = [run_example(n, golden_dir=golden_dir) for n in selected]
    return {
        "examples": [r.to_json() for r in reports],
        "passed": sum(r.ok for r in reports),
        "failed": sum(not r.ok for r in reports),
        "ok": all(r.ok for r in reports),
    }


def write_goldens(golden_dir: Path = GOLDEN_DIR) -> list[Path]:
    golden_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in EXAMPLES:
        report = run_example(name, golden_dir=None)
        path = golden_dir / f"{name}.json"
        path.write_text(dumps(report.result))
        written.append(path)
    return written


# -- random finite models ----------------------------------------------------------

_TREE_WEIGHTS = (1, 1, 2, 2, 3, Fraction(3, 2), Fraction(5, 2))


def _tree_metric(parent: list[int], weight: list[Fraction]) -> PointCloud:
    n = len(parent)
    depth = [Fraction(0)] * n
    ancestors = [[0]]
    for i in range(1, n):
        depth[i] = depth[parent[i]] + weight[i]
        ancestors.append([i] + ancestors[parent[i]])
    dist = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        mine = set(ancestors[i])
        for j in range(n):
            common = next(a for a in ancestors[j] if a in mine)
            dist[i][j] = depth[i] + depth[j] - 2 * depth[common]
    return PointCloud(dist)


def random_tree_model(rng: random.Random, num_points: int) -> PointCloud:
    """Path metric of a random weighted tree rooted at the basepoint.

    Parents are mostly among the few previous points, which favours long
    branches that reach far from the root.
    """
    parent = [-1]
    weight = [Fraction(0)]
    for i in range(1, num_points):
        lo = max(0, i - 3) if rng.random() < 0.7 else 0
        parent.append(rng.randrange(lo, i))
        weight.append(Fraction(rng.choice(_TREE_WEIGHTS)))
    return _tree_metric(parent, weight)


_LEG_WEIGHTS = (1, 1, Fraction(3, 2), 2)


def random_spider_model(rng: random.Random, legs: int, reach: int, twigs: int = 4) -> PointCloud:
    """A few long legs from the basepoint plus short dead-end twigs.

    Each leg reaches norm at least ``reach``, so with ``reach`` well above
    the window the default truncation is thick and every leg is one end.
    """
    parent = [-1]
    weight = [Fraction(0)]
    for _ in range(legs):
        here, depth = 0, Fraction(0)
        while depth < reach:
            step = Fraction(rng.choice(_LEG_WEIGHTS))
            parent.append(here)
            weight.append(step)
            here, depth = len(parent) - 1, depth + step
    for _ in range(twigs):
        here = rng.randrange(len(parent))
        for _ in range(rng.randint(1, 3)):
            parent.append(here)
            weight.append(Fraction(rng.choice(_LEG_WEIGHTS)))
            here = len(parent) - 1
    return _tree_metric(parent, weight)


def random_truncation(rng: random.Random, space: PointCloud) -> TruncationParams:
    """R at the farthest point, so the shell is never empty, and R - W > r."""
    outer = max(space.matrix[space.basepoint])
    inner = Fraction(rng.randint(0, int(outer)), 2)
    if inner >= outer:
        inner = Fraction(0)
    margin = (outer - inner) * Fraction(rng.randint(2, 8), 10)
    return TruncationParams(outer, inner, margin)


def random_concrete_sequence(rng: random.Random, levels: int = 6, max_size: int = 4,
                             start: int = 1, surjective_top: bool = True):
    """Random window; with ``surjective_top`` every top element has a preimage."""
    from .dirseq import ConcreteSequence

    sizes = [rng.randint(1, max_size) for _ in range(levels)]
    if surjective_top and levels > 1:
        sizes[-1] = rng.randint(1, sizes[-2])
    names = [[f"a{i}_{k}" for k in range(n)] for i, n in enumerate(sizes)]
    bondings = []
    for i in range(levels - 1):
        upper = names[i + 1]
        table = {x: rng.choice(upper) for x in names[i]}
        if surjective_top and i == levels - 2:
            order = list(names[i])
            rng.shuffle(order)
            for x, y in zip(order, upper):
                table[x] = y
        bondings.append(table)
    return ConcreteSequence(start, names, bondings)


@dataclass
class EquivalentPair:
    source: Any
    target: Any
    forward: Any
    backward: Any
    source_levels: list
    target_levels: list


def random_equivalent_pair(rng: random.Random, levels: int = 6, max_size: int = 4) -> EquivalentPair:
    """A window, a relabelled copy with extra elements, and morphisms both ways.

    The copy ``B`` has ``B_i = rho(A_i) + junk_i`` where junk is sent by the
    bonding into ``rho(A_{i+1})``.  ``f_i = rho`` possibly pushed up one level,
    and ``g_i`` lands one level up in ``A``.
    """
    from .dirseq import ConcreteSequence, Morphism

    a = random_concrete_sequence(rng, levels, max_size)
    rho = {x: f"b{n}" for n, x in enumerate(x for i in a.indices for x in a.level(i))}
    back = {v: k for k, v in rho.items()}
    b_levels, b_bondings, junk_image = [], [], {}
    for i in a.indices:
        level = [rho[x] for x in a.level(i)]
        if i < a.stop:
            for k in range(rng.randint(0, 2)):
                j = f"junk{i}_{k}"
                junk_image[j] = rho[rng.choice(a.level(i + 1))]
                level.append(j)
        rng.shuffle(level)
        b_levels.append(level)
    for i in a.indices[:-1]:
        phi = a.bond(i, i + 1)
        b_bondings.append({y: (rho[phi(back[y])] if y in back else junk_image[y])
                           for y in b_levels[i - a.start]})
    b = ConcreteSequence(a.start, b_levels, b_bondings)
    lag = rng.choice((0, 1))
    f_levels = [i for i in a.indices if i + lag <= a.stop]
    forward = Morphism({i: i + lag for i in f_levels},
                       {i: {x: rho[a.bond(i, i + lag)(x)] for x in a.level(i)} for i in f_levels})
    g_levels = list(b.indices[:-1])
    backward = Morphism(
        {i: i + 1 for i in g_levels},
        {i: {y: (a.bond(i, i + 1)(back[y]) if y in back else back[junk_image[y]]) for y in b.level(i)}
         for i in g_levels})
    checked = [i for i in a.indices if i + lag + 1 <= a.stop]
    return EquivalentPair(a, b, forward, backward, checked, checked)


FUZZ_KINDS = ("rebond", "grow", "swap", "independent")


def random_fuzz_pair(rng: random.Random, kind: str | None = None) -> tuple[str, EquivalentPair]:
    """A pair that may or may not be equivalent, with candidate morphisms.

    ``rebond`` redirects one target bonding value, ``grow`` adds a target
    element with a random bonding and partner value, ``swap`` exchanges the
    roles of an equivalent pair and ``independent`` draws an unrelated target
    (its morphisms are ``None``).  Whether a pair is verified is left to the
    caller's checks.
    """
    from .dirseq import ConcreteSequence, Morphism

    kind = kind or rng.choice(FUZZ_KINDS)
    pair = random_equivalent_pair(rng)
    a, b = pair.source, pair.target
    if kind == "swap":
        return kind, EquivalentPair(b, a, pair.backward, pair.forward, pair.target_levels, pair.source_levels)
    if kind == "independent":
        other = random_concrete_sequence(rng, len(a.levels))
        return kind, EquivalentPair(a, other, None, None, [], [])
    levels = [list(level) for level in b.levels]
    bondings = [dict(bond.table) for bond in b.bondings]
    g_maps = {i: dict(m) for i, m in pair.backward.maps.items()}
    k = rng.randrange(len(bondings))
    if kind == "rebond":
        x = rng.choice(levels[k])
        bondings[k][x] = rng.choice(levels[k + 1])
    elif kind == "grow":
        new = f"extra{k}"
        levels[k].append(new)
        bondings[k][new] = rng.choice(levels[k + 1])
        i = b.start + k
        if i in g_maps:
            g_maps[i][new] = rng.choice(a.level(pair.backward.index_map[i]))
    else:
        raise ValueError(f"unknown fuzz kind {kind!r}")
    target = ConcreteSequence(b.start, levels, bondings)
    backward = Morphism(pair.backward.index_map, g_maps)
    return kind, EquivalentPair(a, target, pair.forward, backward, pair.source_levels, pair.target_levels)
