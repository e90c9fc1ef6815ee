"""Command-line front end.

Commands: check, select, reduce-setcover, solve-setcover, gen, bench.
Exit codes: 0 success, 1 infeasible / has fixed modes, 2 usage or parse error.
All output is JSON (``--format table`` flattens it for reading); identical
inputs and flags produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from ioselect import oracle_bench, selector
from ioselect.graph_core import build_graphs, decompose_sccs, dump_condensation, dump_system_digraph
from ioselect.matching import NoPerfectMatching, dump_matching
from ioselect.selector import SystemHasSFMs, ValidationFailed
from ioselect.set_cover import (
    Infeasible,
    TooLarge,
    exact_solve,
    greedy_solve,
    reduce_accessibility_to_wsc,
    wsc_from_json,
    wsc_to_json,
)
from ioselect.system_model import (
    COST_SCALE,
    FormatError,
    ModelError,
    Selection,
    StructuredSystem,
    format_cost,
    format_ratio,
    restrict,
    system_from_json,
    system_to_json,
    transpose_dual,
    validate,
    with_mode,
)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2


class _UsageError(Exception):
    pass


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise _UsageError(f"{path}: line {exc.lineno}: {exc.msg}") from exc


def _load_system(path: str) -> StructuredSystem:
    try:
        system = system_from_json(_load_json(path))
    except FormatError as exc:
        raise _UsageError(f"{path}: {exc}") from exc
    report = validate(system)
    if not report.ok:
        raise _UsageError(f"{path}: " + "; ".join(report.violations))
    return system


def _parse_index_list(text: str, count: int, kind: str) -> frozenset[int]:
    """Comma-separated 1-based indices -> 0-based frozenset."""
    chosen = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            idx = int(part)
        except ValueError:
            raise _UsageError(f"--{kind}: {part!r} is not an integer") from None
        if not 1 <= idx <= count:
            raise _UsageError(f"--{kind}: index {idx} out of range 1..{count}")
        chosen.add(idx - 1)
    return frozenset(chosen)


def _selection_from_flags(system: StructuredSystem, args) -> Selection:
    inputs = (
        frozenset(range(system.m))
        if args.inputs is None
        else _parse_index_list(args.inputs, system.m, "inputs")
    )
    outputs = (
        frozenset(range(system.p))
        if args.outputs is None
        else _parse_index_list(args.outputs, system.p, "outputs")
    )
    return Selection(inputs=inputs, outputs=outputs)


def _flatten(obj, prefix: str, lines: list[str]) -> None:
    if isinstance(obj, dict):
        for key, val in obj.items():
            _flatten(val, f"{prefix}.{key}" if prefix else str(key), lines)
    elif isinstance(obj, list):
        if obj and any(isinstance(x, (dict, list)) for x in obj):
            for i, val in enumerate(obj):
                _flatten(val, f"{prefix}[{i}]", lines)
        else:
            body = " ".join(str(x) for x in obj) if obj else "(none)"
            lines.append(f"{prefix} = {body}")
    else:
        lines.append(f"{prefix} = {obj}")


def _emit(doc: dict, args) -> None:
    if getattr(args, "format", "json") == "table":
        lines: list[str] = []
        _flatten(doc, "", lines)
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(doc, indent=2) + "\n"
    out = getattr(args, "output", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _cmd_check(args) -> int:
    system = _load_system(args.instance)
    if args.discrete:
        system = with_mode(system, "discrete")
    sel = _selection_from_flags(system, args)
    try:
        status = selector.check_no_sfm(system, sel)
    except IndexError as exc:
        raise _UsageError(str(exc)) from exc
    doc = {
        "no_sfm": status.ok,
        "reason": status.value,
        "mode": system.mode,
        "selection": {
            "inputs": [i + 1 for i in sel.sorted_inputs()],
            "outputs": [j + 1 for j in sel.sorted_outputs()],
        },
    }
    if not status.ok:
        doc["witness"] = selector.sfm_witness(system, status, sel)
    if args.dump_graph:
        sub = restrict(system, sel)
        _sg, dg = build_graphs(sub)
        scc = decompose_sccs(_sg)
        _write_text(args.dump_graph, dump_system_digraph(dg) + "\n" + dump_condensation(scc))
    _emit(doc, args)
    return EXIT_OK if status.ok else EXIT_INFEASIBLE


def _cmd_select(args) -> int:
    system = _load_system(args.instance)
    if args.discrete:
        system = with_mode(system, "discrete")
    try:
        report = selector.select_min_cost_io(system, exact_covers=args.exact)
    except SystemHasSFMs as exc:
        _emit({"error": str(exc), "reason": exc.status.value, "witness": exc.witness}, args)
        return EXIT_INFEASIBLE
    except ValidationFailed as exc:
        raise _UsageError("; ".join(exc.violations)) from exc
    except TooLarge as exc:
        raise _UsageError(str(exc)) from exc
    oracle = None
    if args.exact:
        try:
            oracle = oracle_bench.exact_select(system)
        except TooLarge as exc:
            raise _UsageError(str(exc)) from exc
    doc = selector.report_to_json(report, include_traces=args.trace, oracle=oracle)
    if args.dump_matching:
        text = "# no matching stage\n" if report.matching is None else dump_matching(report.matching)
        _write_text(args.dump_matching, text)
    _emit(doc, args)
    return EXIT_OK


def _cmd_reduce_setcover(args) -> int:
    system = _load_system(args.instance)
    if args.dual:
        system = transpose_dual(system)
    inst, labels = reduce_accessibility_to_wsc(system)
    doc = wsc_to_json(inst)
    doc["labels"] = [list(states) for states in labels]
    _emit(doc, args)
    return EXIT_OK


def _cmd_solve_setcover(args) -> int:
    try:
        inst = wsc_from_json(_load_json(args.instance))
    except FormatError as exc:
        raise _UsageError(f"{args.instance}: {exc}") from exc
    try:
        cover = greedy_solve(inst)
    except Infeasible as exc:
        _emit({"error": str(exc), "element": exc.element + 1}, args)
        return EXIT_INFEASIBLE
    doc = {
        "cover": sorted(k + 1 for k in cover.chosen),
        "weight": format_cost(cover.weight),
    }
    if args.exact:
        try:
            best = exact_solve(inst)
        except TooLarge as exc:
            raise _UsageError(str(exc)) from exc
        doc["exact"] = {
            "cover": sorted(k + 1 for k in best.chosen),
            "weight": format_cost(best.weight),
        }
    if args.trace:
        doc["steps"] = [
            {
                "set": step.set_index + 1,
                "newly_covered": sorted(e + 1 for e in step.newly_covered),
                "ratio": format_ratio(step.ratio / COST_SCALE),
            }
            for step in cover.trace
        ]
    _emit(doc, args)
    return EXIT_OK


def _generator_config(args) -> oracle_bench.GeneratorConfig:
    try:
        return oracle_bench.GeneratorConfig(
            n=args.n,
            m=args.m,
            p=args.p,
            state_density=args.state_density,
            input_density=args.input_density,
            output_density=args.output_density,
            cost_range=(args.cost_lo, args.cost_hi),
            cost_decimals=args.cost_decimals,
            seed=args.seed,
            mode="discrete" if args.discrete else "continuous",
            require_feasible=not args.allow_sfms,
            max_attempts=args.max_attempts,
        )
    except ModelError as exc:
        raise _UsageError(str(exc)) from exc


def _cmd_gen(args) -> int:
    config = _generator_config(args)
    try:
        system = oracle_bench.generate(config)
    except oracle_bench.GenerationFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    _emit(system_to_json(system), args)
    return EXIT_OK


def _cmd_bench(args) -> int:
    sizes = []
    for part in str(args.n).split(","):
        part = part.strip()
        if part:
            try:
                sizes.append(int(part))
            except ValueError:
                raise _UsageError(f"--n: {part!r} is not an integer") from None
    if not sizes:
        raise _UsageError("--n: no sizes given")
    configs = []
    for n in sizes:
        sub = argparse.Namespace(**{**vars(args), "n": n})
        configs.append(_generator_config(sub))
    records, summary = oracle_bench.bench(configs, args.trials, oracle=args.oracle)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            oracle_bench.write_jsonl(records, summary, fh)
    else:
        oracle_bench.write_jsonl(records, summary, sys.stdout)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            oracle_bench.write_csv(records, fh)
    return EXIT_OK


def _add_generator_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--m", type=int, required=True, help="number of candidate inputs")
    sub.add_argument("--p", type=int, required=True, help="number of candidate outputs")
    sub.add_argument("--state-density", type=float, default=0.25)
    sub.add_argument("--input-density", type=float, default=0.5)
    sub.add_argument("--output-density", type=float, default=0.5)
    sub.add_argument("--cost-lo", default="1", help="lowest cost (decimal string)")
    sub.add_argument("--cost-hi", default="1", help="highest cost (decimal string)")
    sub.add_argument("--cost-decimals", type=int, default=0)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--discrete", action="store_true", help="discrete-time instances")
    sub.add_argument("--allow-sfms", action="store_true", help="skip the feasibility rejection loop")
    sub.add_argument("--max-attempts", type=int, default=200)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ioselect",
        description="minimum-cost input/output selection for structured systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="decide absence of structurally fixed modes")
    c.add_argument("instance", help="instance JSON path")
    c.add_argument("--inputs", help="comma-separated 1-based input indices (default: all)")
    c.add_argument("--outputs", help="comma-separated 1-based output indices (default: all)")
    c.add_argument("--discrete", action="store_true", help="override mode to discrete")
    c.add_argument("--dump-graph", metavar="PATH", help="write system digraph + condensation")
    c.add_argument("--format", choices=("json", "table"), default="json")
    c.add_argument("-o", "--output", help="write result here instead of stdout")

    s = sub.add_parser("select", help="three-stage minimum-cost selection")
    s.add_argument("instance")
    s.add_argument("--exact", action="store_true", help="add brute-force oracle + exact cover bounds")
    s.add_argument("--trace", action="store_true", help="include greedy/matching traces")
    s.add_argument("--discrete", action="store_true", help="override mode to discrete")
    s.add_argument("--dump-matching", metavar="PATH", help="write the stage-3 matching edge list")
    s.add_argument("--format", choices=("json", "table"), default="json")
    s.add_argument("-o", "--output")

    r = sub.add_parser("reduce-setcover", help="emit the accessibility set-cover instance")
    r.add_argument("instance")
    r.add_argument("--dual", action="store_true", help="reduce sensability instead")
    r.add_argument("--format", choices=("json", "table"), default="json")
    r.add_argument("-o", "--output")

    w = sub.add_parser("solve-setcover", help="greedy (optionally exact) weighted set cover")
    w.add_argument("instance", help="set-cover JSON path")
    w.add_argument("--exact", action="store_true")
    w.add_argument("--trace", action="store_true")
    w.add_argument("--format", choices=("json", "table"), default="json")
    w.add_argument("-o", "--output")

    g = sub.add_parser("gen", help="generate a reproducible random instance")
    g.add_argument("--n", type=int, required=True, help="number of states")
    _add_generator_flags(g)
    g.add_argument("--format", choices=("json", "table"), default="json")
    g.add_argument("-o", "--output")

    b = sub.add_parser("bench", help="run the ratio/runtime harness")
    b.add_argument("--n", required=True, help="state counts, comma-separated (e.g. 100,200,400)")
    _add_generator_flags(b)
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--oracle", action="store_true", help="brute-force optimum per instance")
    b.add_argument("--csv", metavar="PATH", help="also export records as CSV")
    b.add_argument("-o", "--output", help="write JSONL here instead of stdout")
    return parser


_COMMANDS = {
    "check": _cmd_check,
    "select": _cmd_select,
    "reduce-setcover": _cmd_reduce_setcover,
    "solve-setcover": _cmd_solve_setcover,
    "gen": _cmd_gen,
    "bench": _cmd_bench,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoPerfectMatching as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (FormatError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
