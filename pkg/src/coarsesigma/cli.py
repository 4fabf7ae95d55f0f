"""Command line: ``coarsesigma {sigma, compare, limit, verify-paper}``.

Exit codes: 0 success, 1 a check failed, 2 bad input, 3 truncation too thin,
4 oracle guard refused the model.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .dirseq import (DirectSequenceError, Morphism, SymbolicSequence, cardinality_obstruction,
                     check_equivalence, check_morphism, direct_limit, identity_morphism, sequence_from_json)
from .examples import EXAMPLES, GOLDEN_DIR, dumps, verify_paper
from .functor import ControlError, ControlledMap, validate_controlled, verify_coarse_equivalence
from .rips import ThinTruncationError, TruncationMismatchError, TruncationParams, to_dot
from .seqcore import OracleGuardError, OracleModel, oracle_agreement
from .sigma import ind_sigma
from .space import SpaceError, as_rational, build_space

EXIT_OK, EXIT_FAIL, EXIT_SPEC, EXIT_THIN, EXIT_GUARD = 0, 1, 2, 3, 4


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    window: tuple = (1, 1)
    radius: Fraction | None = None
    inner: Fraction | None = None
    margin: Fraction | None = None
    output: Path | None = None
    json_stdout: bool = False
    oracle: bool = False
    dot: Path | None = None

    def __post_init__(self) -> None:
        lo, hi = self.window
        if lo < 1 or hi < lo:
            raise InputError(f"window bounds must satisfy 1 <= a <= b, got {lo}:{hi}")
        if self.radius is not None and self.inner is not None and not self.inner < self.radius:
            raise InputError("need r < R")

    def truncation(self, default_radius: Any) -> TruncationParams:
        radius = self.radius if self.radius is not None else as_rational(default_radius)
        return TruncationParams(radius, self.inner, self.margin)


def _window(text: str) -> tuple[int, int]:
    try:
        lo, _, hi = text.partition(":")
        return int(lo), int(hi or lo)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"window must look like a:b, got {text!r}") from exc


def _rational(text: str) -> Fraction:
    try:
        return as_rational(text)
    except SpaceError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _load(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def _config(args: argparse.Namespace, inputs: list) -> RunConfig:
    return RunConfig(
        command=args.command, inputs=inputs, window=getattr(args, "window", None) or (1, 1),
        radius=getattr(args, "radius", None), inner=getattr(args, "inner", None),
        margin=getattr(args, "margin", None), output=args.output, json_stdout=args.json,
        oracle=getattr(args, "oracle", False), dot=getattr(args, "dot", None),
    )


def _emit(config: RunConfig, report: dict, summary: list[str]) -> None:
    text = dumps(report)
    if config.output is not None:
        config.output.write_text(text)
    if config.json_stdout:
        sys.stdout.write(text)
    else:
        for line in summary:
            print(line)


# -- commands ----------------------------------------------------------------------

def cmd_sigma(config: RunConfig) -> int:
    space = build_space(_load(config.inputs[0]))
    lo, hi = config.window
    trunc = config.truncation(default_radius=max(4 * (hi + 1), 20))
    window = ind_sigma(space, (lo, hi), trunc)
    report = window.to_json()
    report["direct_sequence"] = window.to_direct_sequence(json_labels=True).to_json()
    summary = [f"sigma window {lo}..{hi} on R={window.truncation.outer_radius}, "
               f"r={window.truncation.inner_radius}"]
    summary += [f"  N={n}: {len(level)} class{'' if len(level) == 1 else 'es'}"
                for n, level in sorted(window.levels.items())]
    if report["stability"] is not None:
        summary.append(f"  stability: {report['stability']['verdict']}")
    status = EXIT_OK
    if config.oracle:
        rows = []
        for n, level in sorted(window.levels.items()):
            model = OracleModel(space, window.truncation.resolve(n))
            rows.append(oracle_agreement(level, model))
        report["oracle"] = [r.to_json() for r in rows]
        agree = sum(r.agrees for r in rows)
        summary.append(f"  oracle agreement: {agree}/{len(rows)} levels "
                       + " ".join(f"N={r.scale}:{r.sigma_count}/{r.oracle_count}" for r in rows))
        if agree != len(rows):
            status = EXIT_FAIL
    if config.dot is not None:
        top = window.levels[hi].analysis.graph
        config.dot.write_text(to_dot(top))
        summary.append(f"  scale-{hi} graph written to {config.dot}")
    _emit(config, report, summary)
    return status


def _is_space(data: Any) -> bool:
    return isinstance(data, dict) and "kind" in data


def _compare_sequences(config: RunConfig, a_data: dict, b_data: dict, args) -> tuple[dict, int]:
    a, b = sequence_from_json(a_data), sequence_from_json(b_data)
    morphisms = None
    if args.identity:
        if isinstance(a, SymbolicSequence) or isinstance(b, SymbolicSequence):
            if a != b:
                raise InputError("identity morphisms need two equal sequences")
            return ({"verdict": "equivalent-verified", "method": "identity on equal symbolic sequences"},
                    EXIT_OK)
        if a != b:
            raise InputError("identity morphisms need two equal sequences")
        morphisms = identity_morphism(a), identity_morphism(b)
    elif args.morphisms:
        morphisms = tuple(Morphism.from_json(_load(p)) for p in args.morphisms)
    if morphisms is not None:
        if isinstance(a, SymbolicSequence) or isinstance(b, SymbolicSequence):
            raise InputError("morphism checks need concrete windows")
        f, g = morphisms
        checks = [check_morphism(f, a, b), check_morphism(g, b, a)]
        eq = check_equivalence(f, g, a, b)
        report = {"method": "supplied morphisms", "forward": checks[0].to_json(),
                  "backward": checks[1].to_json(), "equivalence": eq.to_json()}
        if all(c.ok for c in checks) and eq.status == "pass":
            report["verdict"] = "equivalent-verified"
            return report, EXIT_OK
        report["verdict"] = "inconclusive"
        failed = not all(c.ok for c in checks) or eq.status == "fail"
        return report, EXIT_FAIL if failed else EXIT_OK
    forward, backward = cardinality_obstruction(a, b), cardinality_obstruction(b, a)
    verdict = "not_equivalent" if "not_equivalent" in (forward.verdict, backward.verdict) else "inconclusive"
    return {"method": "cardinality obstruction", "verdict": verdict,
            "a_vs_b": forward.to_json(), "b_vs_a": backward.to_json()}, EXIT_OK


def _compare_spaces(config: RunConfig, x_data: dict, y_data: dict, args) -> tuple[dict, int]:
    x, y = build_space(x_data), build_space(y_data)
    lo, hi = config.window
    trunc = config.truncation(default_radius=max(8 * (hi + 1), 40))
    if args.forward and args.backward:
        f = ControlledMap.from_json(_load(args.forward), x, y)
        g = ControlledMap.from_json(_load(args.backward), y, x)
        # declared control and closeness are checked on a ball, not trusted
        radius = min(trunc.outer_radius / 2, 4 * (hi + 1))
        declared = [validate_controlled(f, radius, g), validate_controlled(g, radius, f)]
        result = verify_coarse_equivalence(f, g, (lo, hi), trunc, trunc)
        report = {"method": "coarse maps", **result.to_json(),
                  "declared_data": [d.to_json() for d in declared]}
        if not all(d.ok for d in declared):
            report["status"] = "fail"
            report["verdict"] = "inconclusive"
            return report, EXIT_FAIL
        if result.passed:
            report["verdict"] = "equivalent-verified"
            return report, EXIT_OK
        report["verdict"] = "inconclusive"
        return report, EXIT_FAIL if result.status == "fail" else EXIT_OK
    if args.forward or args.backward:
        raise InputError("--forward and --backward go together")
    wx, wy = ind_sigma(x, (lo, hi), trunc), ind_sigma(y, (lo, hi), trunc)
    a, b = wx.to_direct_sequence(True), wy.to_direct_sequence(True)
    forward, backward = cardinality_obstruction(a, b), cardinality_obstruction(b, a)
    verdict = "not_equivalent" if "not_equivalent" in (forward.verdict, backward.verdict) else "inconclusive"
    return {"method": "cardinality obstruction on windows (window-relative)", "verdict": verdict,
            "sizes": [list(wx.sizes()), list(wy.sizes())],
            "a_vs_b": forward.to_json(), "b_vs_a": backward.to_json()}, EXIT_OK


def cmd_compare(config: RunConfig, args: argparse.Namespace) -> int:
    a_data, b_data = (_load(p) for p in config.inputs)
    if _is_space(a_data) != _is_space(b_data):
        raise InputError("compare needs two spaces or two direct sequences")
    if _is_space(a_data):
        report, status = _compare_spaces(config, a_data, b_data, args)
    else:
        report, status = _compare_sequences(config, a_data, b_data, args)
    _emit(config, report, [f"verdict: {report['verdict']} ({report['method']})"])
    return status


def cmd_limit(config: RunConfig) -> int:
    data = _load(config.inputs[0])
    if _is_space(data):
        raise InputError("limit takes a direct sequence file; use `sigma --output` to make one")
    if "direct_sequence" in data:
        data = data["direct_sequence"]
    seq = sequence_from_json(data)
    limit = direct_limit(seq)
    report = limit.to_json()
    card = report["cardinality"]
    _emit(config, report, [f"direct limit: {card} classes" if card != "omega" else "direct limit: cardinality omega"])
    return EXIT_OK


def cmd_verify_paper(config: RunConfig, args: argparse.Namespace) -> int:
    names = args.filter or None
    for name in names or []:
        if name not in EXAMPLES:
            raise InputError(f"unknown example {name!r}; known: {', '.join(EXAMPLES)}")
    result = verify_paper(names, golden_dir=args.goldens)
    summary = []
    for ex in result["examples"]:
        line = f"{'PASS' if ex['ok'] else 'FAIL'} {ex['name']}"
        if ex["first_divergence"]:
            line += f": first divergence in {ex['first_divergence']}"
        if ex["golden"] == "mismatch":
            line += "; golden mismatch: " + "; ".join(ex["golden_diff"][:3])
        elif ex["golden"] == "missing":
            line += "; golden file missing"
        summary.append(line)
    summary.append(f"{result['passed']} passed, {result['failed']} failed")
    _emit(config, result, summary)
    return EXIT_OK if result["ok"] else EXIT_FAIL


# -- entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coarsesigma", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--json", action="store_true", help="print the JSON report instead of a summary")
        p.add_argument("--output", type=Path, help="write the JSON report here")

    def truncation(p: argparse.ArgumentParser) -> None:
        p.add_argument("--window", type=_window, default=(1, 1), help="scale window a:b")
        p.add_argument("--radius", type=_rational, help="outer radius R")
        p.add_argument("--inner", type=_rational, help="inner radius r (default: window top)")
        p.add_argument("--margin", type=_rational, help="witness margin W (default: N+1)")

    p = sub.add_parser("sigma", help="sigma levels and bondings over a scale window")
    p.add_argument("--space", type=Path, required=True)
    truncation(p)
    p.add_argument("--oracle", action="store_true", help="cross-check every level with the path oracle")
    p.add_argument("--dot", type=Path, help="write the top-scale graph in Graphviz format")
    common(p)

    p = sub.add_parser("compare", help="compare two spaces or two direct sequences")
    p.add_argument("inputs", type=Path, nargs=2)
    truncation(p)
    p.add_argument("--identity", action="store_true", help="check identity morphisms")
    p.add_argument("--morphisms", type=Path, nargs=2, metavar=("F", "G"), help="morphism files f, g")
    p.add_argument("--forward", type=Path, help="controlled map file X -> Y")
    p.add_argument("--backward", type=Path, help="controlled map file Y -> X")
    common(p)

    p = sub.add_parser("limit", help="direct limit of a direct sequence")
    p.add_argument("sequence", type=Path)
    common(p)

    p = sub.add_parser("verify-paper", help="run the built-in examples against their goldens")
    p.add_argument("--filter", action="append", help="only run this example (repeatable)")
    p.add_argument("--goldens", type=Path, default=GOLDEN_DIR, help="golden directory")
    common(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sigma":
            return cmd_sigma(_config(args, [args.space]))
        if args.command == "compare":
            return cmd_compare(_config(args, list(args.inputs)), args)
        if args.command == "limit":
            return cmd_limit(_config(args, [args.sequence]))
        return cmd_verify_paper(_config(args, []), args)
    except ThinTruncationError as exc:
        print(f"error: truncation too thin: {exc}", file=sys.stderr)
        return EXIT_THIN
    except OracleGuardError as exc:
        print(f"error: oracle refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (InputError, SpaceError, DirectSequenceError, ControlError, TruncationMismatchError,
            KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
