"""Command-line front end.

Four subcommands cover the pipeline: `solve` computes threshold budgets,
`synth` runs one of the three synthesis regimes, `simulate` plays two
tenders (or a tender against an adversary) under the auction composition,
and `grid` bundles generation, synthesis, and simulation for one-way grid
instances. Exit codes are a stable contract: 0 success, 1 synthesis Fail,
2 bad input, 3 solver failure, 4 initial vertex pruned.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import InputError, OracleError, PrunedStartError, SolverError
from .graphs import (
    Graph,
    Objective,
    base_vertex,
    dump_json,
    graph_from_json,
    graph_to_json,
    is_base_copy,
    load_json,
    objective_from_json,
    objective_to_json,
    to_dot,
)
from .grids import generate_grid, grid_spec_from_json, grid_spec_to_json, grid_to_graph
from .rational import format_fraction, parse_fraction
from .report import render_budget_figure, render_grid_figure
from .runtime import (
    ADVERSARY_KINDS,
    TraceRecord,
    adversary_tender,
    check_objective,
    default_split,
    run_composition,
    verdicts_to_json,
    write_trace_csv,
    write_trace_jsonl,
)
from .synthesis import (
    MODE_AA,
    MODE_AG,
    MODE_STRONG,
    SUCCESS,
    Contract,
    SynthesisOutcome,
    Tender,
    contract_from_json,
    outcome_to_json,
    synthesize,
    tender_from_json,
    tender_to_json,
)
from .thresholds import EXACT, ITERATIVE, SolverConfig, solve_objective, threshold_map_to_json

logger = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_SYNTH_FAIL = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_PRUNED = 4


@dataclass(frozen=True)
class RunManifest:
    """What was run, on which inputs, with which knobs."""

    command: str
    inputs: dict[str, str]
    config: SolverConfig
    seed: int | None
    out_dir: str


def manifest_to_json(manifest: RunManifest) -> dict:
    return {
        "command": manifest.command,
        "inputs": dict(manifest.inputs),
        "config": {
            "mode": manifest.config.mode,
            "tolerance": manifest.config.tolerance,
            "max_iterations": manifest.config.max_iterations,
        },
        "seed": manifest.seed,
        "out_dir": manifest.out_dir,
    }


def _setup_logging() -> None:
    name = os.environ.get("BIDSCHED_LOG", "WARNING").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    mode = ITERATIVE if getattr(args, "iterative", False) else EXACT
    tolerance = args.tolerance if getattr(args, "tolerance", None) is not None else 1e-9
    return SolverConfig(mode=mode, tolerance=tolerance)


def _ensure_out(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create output directory {path}: {exc}") from exc
    return out


def _write_manifest(
    out: Path,
    command: str,
    inputs: dict[str, str | None],
    config: SolverConfig,
    seed: int | None,
) -> None:
    present = {name: str(path) for name, path in inputs.items() if path is not None}
    missing = [path for path in present.values() if not Path(path).exists()]
    if missing:
        raise InputError(f"input files do not exist: {missing}")
    manifest = RunManifest(command, present, config, seed, str(out))
    dump_json(manifest_to_json(manifest), out / "manifest.json")


def _load_objective_file(path: str) -> dict[str, Objective]:
    """A file holds either one objective or an objective_1/objective_2 pair."""
    data = load_json(path)
    if "objective_1" in data or "objective_2" in data:
        try:
            return {
                "objective_1": objective_from_json(data["objective_1"]),
                "objective_2": objective_from_json(data["objective_2"]),
            }
        except KeyError as exc:
            raise InputError(f"objective pair in {path} is missing {exc}") from exc
    return {"objective": objective_from_json(data)}


def _load_objective_pair(path: str) -> tuple[Objective, Objective]:
    loaded = _load_objective_file(path)
    if "objective" in loaded:
        raise InputError(
            f"{path} holds a single objective; synthesis needs objective_1 and objective_2"
        )
    return loaded["objective_1"], loaded["objective_2"]


def _parse_split(text: str):
    try:
        value = parse_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"malformed split {text!r}: {exc}") from exc
    if not 0 <= value <= 1:
        raise InputError(f"split {text!r} is outside [0, 1]")
    return value


def _check_tender_fits(graph: Graph, tender: Tender, label: str) -> None:
    for vertex, succ in tender.action.items():
        if vertex not in graph or succ not in graph.successors(vertex):
            raise InputError(f"{label} action table does not match the graph at {vertex!r}")
    for vertex in tender.base_bid:
        if vertex not in graph:
            raise InputError(f"{label} bid table mentions unknown vertex {vertex!r}")


def _plan_overlay(tender: Tender) -> dict[str, str]:
    """Tender action table projected to original vertex names.

    Keeps only the not-yet-satisfied copy so the overlay shows each side's
    plan before its own objective is fulfilled.
    """
    return {
        base_vertex(v): base_vertex(w)
        for v, w in tender.action.items()
        if is_base_copy(v)
    }


def _project_trace(trace: list[TraceRecord]) -> list[TraceRecord]:
    """Rewrite a product-arena trace in original vertex names."""
    projected = []
    for record in trace:
        projected.append(
            replace(
                record,
                config_before=replace(record.config_before, vertex=base_vertex(record.config_before.vertex)),
                next_vertex=base_vertex(record.next_vertex),
                config_after=replace(record.config_after, vertex=base_vertex(record.config_after.vertex)),
            )
        )
    return projected


def _write_budget_series(trace: list[TraceRecord], initial_budget_1, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["step", "budget_1", "budget_2"])
        writer.writerow([0, float(initial_budget_1), float(1 - initial_budget_1)])
        for record in trace:
            after = record.config_after.budget_1
            writer.writerow([record.step + 1, float(after), float(1 - after)])


def _print_threshold_table(th_map) -> None:
    width = max(len(v) for v in th_map.values)
    width = max(width, len("vertex"))
    print(f"{'vertex':<{width}}  threshold")
    for vertex in sorted(th_map.values):
        print(f"{vertex:<{width}}  {format_fraction(th_map.value(vertex))}")


def _print_outcome(outcome: SynthesisOutcome) -> None:
    print(f"mode: {outcome.mode}")
    print(f"status: {outcome.status}")
    print(f"threshold_1: {format_fraction(outcome.threshold_1)}")
    print(f"threshold_2: {format_fraction(outcome.threshold_2)}")
    if outcome.reason:
        print(f"reason: {outcome.reason}")
    for flag in outcome.flags:
        print(f"flag: {flag}")


def cmd_solve(args: argparse.Namespace) -> int:
    if args.emit_dot and args.out is None:
        raise InputError("--emit-dot needs --out")
    config = _solver_config(args)
    graph = graph_from_json(load_json(args.graph))
    objectives = _load_objective_file(args.objectives)
    maps = {name: solve_objective(graph, objective, config) for name, objective in objectives.items()}

    for name, th_map in maps.items():
        if len(maps) > 1:
            print(f"[{name}]")
        _print_threshold_table(th_map)

    if args.out is not None:
        out = _ensure_out(args.out)
        if len(maps) == 1:
            dump_json(threshold_map_to_json(maps["objective"]), out / "thresholds.json")
        else:
            dump_json(threshold_map_to_json(maps["objective_1"]), out / "thresholds_1.json")
            dump_json(threshold_map_to_json(maps["objective_2"]), out / "thresholds_2.json")
        if args.emit_dot:
            dot = to_dot(graph, objectives.get("objective_1") or objectives.get("objective"), objectives.get("objective_2"))
            (out / "graph.dot").write_text(dot, encoding="utf-8")
        _write_manifest(out, "solve", {"graph": args.graph, "objectives": args.objectives}, config, None)
    else:
        payload = (
            threshold_map_to_json(maps["objective"])
            if len(maps) == 1
            else {name: threshold_map_to_json(m) for name, m in maps.items()}
        )
        print(json.dumps(payload, indent=2))
    return EXIT_SUCCESS


def cmd_synth(args: argparse.Namespace) -> int:
    config = _solver_config(args)
    graph = graph_from_json(load_json(args.graph))
    objective_1, objective_2 = _load_objective_pair(args.objectives)
    contract = contract_from_json(load_json(args.contract)) if args.contract else None
    if args.mode == MODE_AG and contract is None:
        raise InputError("--mode ag requires --contract")

    outcome = synthesize(graph, objective_1, objective_2, args.mode, contract, config)

    out = _ensure_out(args.out)
    dump_json(outcome_to_json(outcome), out / "outcome.json")
    dump_json(graph_to_json(outcome.graph), out / "arena.json")
    if outcome.tenders is not None:
        dump_json(tender_to_json(outcome.tenders[0]), out / "tender_1.json")
        dump_json(tender_to_json(outcome.tenders[1]), out / "tender_2.json")
    if args.emit_dot:
        chosen_1 = outcome.tenders[0].action if outcome.tenders else None
        chosen_2 = outcome.tenders[1].action if outcome.tenders else None
        arena_obj_1 = Objective(objective_1.kind, frozenset(
            v for v in outcome.graph.vertices if base_vertex(v) in objective_1.vertex_set
        ), objective_1.coloring)
        arena_obj_2 = Objective(objective_2.kind, frozenset(
            v for v in outcome.graph.vertices if base_vertex(v) in objective_2.vertex_set
        ), objective_2.coloring)
        dot = to_dot(outcome.graph, arena_obj_1, arena_obj_2, chosen_1, chosen_2)
        (out / "arena.dot").write_text(dot, encoding="utf-8")
    _write_manifest(
        out,
        "synth",
        {"graph": args.graph, "objectives": args.objectives, "contract": args.contract},
        config,
        None,
    )

    _print_outcome(outcome)
    return EXIT_SUCCESS if outcome.status == SUCCESS else EXIT_SYNTH_FAIL


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _solver_config(args)
    graph = graph_from_json(load_json(args.graph))
    objectives = _load_objective_file(args.objectives) if args.objectives else {}

    tender_1 = tender_from_json(load_json(args.tender_1))
    _check_tender_fits(graph, tender_1, "tender 1")
    if args.tender_2 is not None and args.adversary is not None:
        raise InputError("--tender-2 and --adversary are mutually exclusive")
    if args.tender_2 is not None:
        tender_2 = tender_from_json(load_json(args.tender_2))
        _check_tender_fits(graph, tender_2, "tender 2")
    elif args.adversary is not None:
        spoiled = objectives.get("objective_1") or objectives.get("objective")
        tender_2 = adversary_tender(args.adversary, args.seed, graph, spoiled, config)
    else:
        raise InputError("provide --tender-2 or --adversary")

    if args.split is not None:
        split = _parse_split(args.split)
    else:
        split = default_split(tender_1.threshold_budget, tender_2.threshold_budget)

    trace, verdicts = run_composition(graph, tender_1, tender_2, split, args.steps, objectives or None)

    out = _ensure_out(args.out)
    write_trace_jsonl(trace, out / "trace.jsonl")
    write_trace_csv(trace, out / "trace.csv")
    _write_budget_series(trace, split, out / "budget_series.csv")
    dump_json(verdicts_to_json(verdicts), out / "verdicts.json")
    if not args.no_figures:
        render_budget_figure(trace, out / "budget.png")
    _write_manifest(
        out,
        "simulate",
        {
            "graph": args.graph,
            "tender_1": args.tender_1,
            "tender_2": args.tender_2,
            "objectives": args.objectives,
        },
        config,
        args.seed,
    )

    final = trace[-1].next_vertex if trace else graph.initial
    final_budget = trace[-1].config_after.budget_1 if trace else split
    print(f"steps: {len(trace)}")
    print(f"final: {final}")
    print(f"budget_1: {format_fraction(final_budget)}")
    for name, verdict in verdicts.items():
        print(f"verdict {name}: {verdict.status} ({verdict.reason})")
    return EXIT_SUCCESS


def cmd_grid(args: argparse.Namespace) -> int:
    config = _solver_config(args)
    if args.spec is not None and (args.rows is not None or args.cols is not None):
        raise InputError("--spec and --rows/--cols are mutually exclusive")
    if args.spec is not None:
        spec = grid_spec_from_json(load_json(args.spec))
    elif args.rows is not None and args.cols is not None:
        spec = generate_grid(args.rows, args.cols, args.density, args.seed)
    else:
        raise InputError("provide --spec or both --rows and --cols")
    contract = contract_from_json(load_json(args.contract)) if args.contract else None
    if args.mode == MODE_AG and contract is None:
        raise InputError("--mode ag requires --contract")

    graph, objective_1, objective_2 = grid_to_graph(spec)
    out = _ensure_out(args.out)
    dump_json(grid_spec_to_json(spec), out / "grid.json")
    dump_json(graph_to_json(graph), out / "graph.json")
    dump_json(
        {"objective_1": objective_to_json(objective_1), "objective_2": objective_to_json(objective_2)},
        out / "objectives.json",
    )
    _write_manifest(
        out,
        "grid",
        {"spec": args.spec, "contract": args.contract},
        config,
        args.seed,
    )

    outcome = synthesize(graph, objective_1, objective_2, args.mode, contract, config)
    dump_json(outcome_to_json(outcome), out / "outcome.json")
    dump_json(graph_to_json(outcome.graph), out / "arena.json")
    if outcome.tenders is None:
        (out / "grid.dot").write_text(to_dot(graph, objective_1, objective_2), encoding="utf-8")
        _print_outcome(outcome)
        return EXIT_SYNTH_FAIL

    tender_1, tender_2 = outcome.tenders
    dump_json(tender_to_json(tender_1), out / "tender_1.json")
    dump_json(tender_to_json(tender_2), out / "tender_2.json")
    split = _parse_split(args.split) if args.split is not None else default_split(
        tender_1.threshold_budget, tender_2.threshold_budget
    )
    trace, _ = run_composition(outcome.graph, tender_1, tender_2, split, args.steps)
    write_trace_jsonl(trace, out / "trace.jsonl")
    write_trace_csv(trace, out / "trace.csv")
    _write_budget_series(trace, split, out / "budget_series.csv")

    cells = _project_trace(trace)
    verdicts = {
        "objective_1": check_objective(cells, objective_1, graph, initial=graph.initial),
        "objective_2": check_objective(cells, objective_2, graph, initial=graph.initial),
    }
    dump_json(verdicts_to_json(verdicts), out / "verdicts.json")

    with open(out / "path_cells.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["step", "cell", "winner"])
        for record in cells:
            writer.writerow([record.step, record.config_before.vertex, record.winner])
        if cells:
            writer.writerow([len(cells), cells[-1].next_vertex, ""])

    dot = to_dot(graph, objective_1, objective_2, _plan_overlay(tender_1), _plan_overlay(tender_2))
    (out / "grid.dot").write_text(dot, encoding="utf-8")
    if not args.no_figures:
        render_budget_figure(trace, out / "budget.png")
        render_grid_figure(spec, cells, out / "grid.png")

    _print_outcome(outcome)
    path = [cells[0].config_before.vertex] + [r.next_vertex for r in cells] if cells else [graph.initial]
    print(f"path: {' -> '.join(path)}")
    for name, verdict in verdicts.items():
        print(f"verdict {name}: {verdict.status} ({verdict.reason})")
    return EXIT_SUCCESS


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true", help="exact rational solving (default)")
    group.add_argument("--iterative", action="store_true", help="floating-point value iteration")
    parser.add_argument("--tolerance", type=float, help="iterative-mode residual bound (default 1e-9)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bidsched",
        description="Synthesize and compose auction-scheduled tenders for two-objective graph games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="compute threshold budgets")
    solve.add_argument("--graph", required=True, help="graph JSON file")
    solve.add_argument("--objectives", required=True, help="objective or objective-pair JSON file")
    solve.add_argument("--out", help="output directory (default: print JSON)")
    solve.add_argument("--emit-dot", action="store_true", help="also write graph.dot")
    _add_solver_flags(solve)
    solve.set_defaults(handler=cmd_solve)

    synth = sub.add_parser("synth", help="synthesize a tender pair")
    synth.add_argument("--graph", required=True, help="graph JSON file")
    synth.add_argument("--objectives", required=True, help="objective-pair JSON file")
    synth.add_argument("--mode", choices=(MODE_STRONG, MODE_AA, MODE_AG), default=MODE_STRONG)
    synth.add_argument("--contract", help="contract JSON file (required for --mode ag)")
    synth.add_argument("--out", default="out", help="output directory (default: out)")
    synth.add_argument("--emit-dot", action="store_true", help="also write arena.dot")
    _add_solver_flags(synth)
    synth.set_defaults(handler=cmd_synth)

    simulate = sub.add_parser("simulate", help="play two tenders under the auction composition")
    simulate.add_argument("--graph", required=True, help="graph JSON file")
    simulate.add_argument("--tender-1", required=True, help="tender JSON file for objective 1")
    simulate.add_argument("--tender-2", help="tender JSON file for objective 2")
    simulate.add_argument("--adversary", choices=ADVERSARY_KINDS, help="opponent kind instead of --tender-2")
    simulate.add_argument("--objectives", help="objective or pair JSON file for verdicts")
    simulate.add_argument("--split", help="initial budget of tender 1 as p/q (default: midpoint of slack)")
    simulate.add_argument("--steps", type=int, help="horizon (default: 10x vertex count)")
    simulate.add_argument("--seed", type=int, default=0, help="adversary seed")
    simulate.add_argument("--out", default="out", help="output directory (default: out)")
    simulate.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    _add_solver_flags(simulate)
    simulate.set_defaults(handler=cmd_simulate)

    grid = sub.add_parser("grid", help="generate, synthesize, and simulate a grid instance")
    grid.add_argument("--spec", help="grid spec JSON file")
    grid.add_argument("--rows", type=int, help="generator: row count")
    grid.add_argument("--cols", type=int, help="generator: column count")
    grid.add_argument("--density", type=float, default=0.2, help="generator: obstacle density")
    grid.add_argument("--seed", type=int, default=0, help="generator seed")
    grid.add_argument("--mode", choices=(MODE_STRONG, MODE_AA, MODE_AG), default=MODE_STRONG)
    grid.add_argument("--contract", help="contract JSON file (required for --mode ag)")
    grid.add_argument("--split", help="initial budget of tender 1 as p/q")
    grid.add_argument("--steps", type=int, help="horizon (default: 10x vertex count)")
    grid.add_argument("--out", default="out", help="output directory (default: out)")
    grid.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    _add_solver_flags(grid)
    grid.set_defaults(handler=cmd_grid)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except PrunedStartError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRUNED
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverError, OracleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
