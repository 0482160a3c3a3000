"""Composition of two tenders: auctions, budget transfers, verdicts.

Each step both tenders bid from their current budgets; the higher bid
(ties to tender 1) buys the move, the winner's action table picks the
next vertex, and the winning bid is paid to the loser, so the budgets
always sum to exactly 1. All arithmetic is rational end-to-end.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import InputError
from .graphs import BUCHI, PARITY, REACH, SAFETY, Graph, Objective, require_valid, scc_decompose
from .rational import format_fraction, parse_fraction
from .synthesis import Tender
from .thresholds import ONE, ZERO, SolverConfig, ThresholdMap, solve_objective

SATISFIED = "Satisfied"
VIOLATED = "Violated"
UNDETERMINED = "Undetermined"

ADVERSARY_KINDS = ("random", "zero", "greedy", "spoiler")


@dataclass(frozen=True)
class Configuration:
    """Token position plus tender 1's budget; tender 2 holds the rest."""

    vertex: str
    budget_1: Fraction

    def __post_init__(self) -> None:
        if not 0 <= self.budget_1 <= 1:
            raise InputError(f"budget {self.budget_1} outside [0, 1]")

    @property
    def budget_2(self) -> Fraction:
        return ONE - self.budget_1


@dataclass(frozen=True)
class TraceRecord:
    step: int
    config_before: Configuration
    bid_1: Fraction
    bid_2: Fraction
    winner: int
    next_vertex: str
    config_after: Configuration


@dataclass(frozen=True)
class Verdict:
    status: str
    reason: str = ""


@dataclass
class History:
    """The run so far: the starting configuration plus every step record."""

    initial: Configuration
    records: list[TraceRecord] = field(default_factory=list)

    def current(self) -> Configuration:
        return self.records[-1].config_after if self.records else self.initial

    def vertices(self) -> list[str]:
        return [self.initial.vertex] + [r.next_vertex for r in self.records]

    def own_budget(self, index: int, player: int) -> Fraction:
        cfg = self.initial if index == 0 else self.records[index - 1].config_after
        return cfg.budget_1 if player == 1 else cfg.budget_2

    def wins(self, player: int, start: int = 0) -> int:
        return sum(1 for r in self.records[start:] if r.winner == player)


@lru_cache(maxsize=128)
def _decomposition(graph: Graph):
    return scc_decompose(graph)


def _surplus(graph: Graph, tender: Tender, history: History, player: int) -> Fraction:
    """Extra amount above the base bid, used to break out of cycles.

    The schedule spends a geometric slice of the initial slack per auction
    won: sigma = epsilon * gamma^(k+1) after k wins, so the total overspend
    stays below epsilon and the budget stays strictly above the threshold.
    Acyclic graphs need no surplus (every play ends regardless), which also
    keeps bids on them exactly equal to the base table. On entering a
    bottom SCC the schedule restarts from the slack above that vertex's
    threshold, funding the pursuit rounds inside.
    """
    decomposition = _decomposition(graph)
    acyclic = all(len(c) == 1 for c in decomposition.components) and all(
        v not in graph.successors(v) for v in graph.vertices
    )
    if acyclic:
        return ZERO
    vseq = history.vertices()
    comp_id = decomposition.component_of[vseq[-1]]
    if decomposition.is_bottom[comp_id]:
        entry = 0
        for i in range(len(vseq) - 1, -1, -1):
            if decomposition.component_of[vseq[i]] != comp_id:
                entry = i + 1
                break
        floor = tender.threshold_budget
        if tender.th_map is not None and vseq[entry] in tender.th_map.values:
            floor = tender.th_map.value(vseq[entry])
        epsilon = max(ZERO, history.own_budget(entry, player) - floor)
        wins = history.wins(player, start=entry)
    else:
        epsilon = max(ZERO, history.own_budget(0, player) - tender.threshold_budget)
        wins = history.wins(player)
    if epsilon == 0:
        return ZERO
    return epsilon * tender.gamma ** (wins + 1)


def _bid_of(
    graph: Graph, tender: Tender, vertex: str, budget: Fraction, history: History, player: int
) -> Fraction:
    if tender.bid_rule is not None:
        return Fraction(tender.bid_rule(graph, vertex, budget, history))
    base = tender.base_bid.get(vertex, ZERO)
    return min(budget, base + _surplus(graph, tender, history, player))


def _action_of(graph: Graph, tender: Tender, vertex: str, history: History) -> str:
    if tender.action_rule is not None:
        return tender.action_rule(graph, vertex, history)
    try:
        return tender.action[vertex]
    except KeyError as exc:
        raise InputError(f"tender has no action at {vertex!r}") from exc


def compose_step(graph: Graph, tender_1: Tender, tender_2: Tender, history: History) -> TraceRecord:
    """One auction: bids, winner by the tie-to-1 rule, move, transfer."""
    before = history.current()
    vertex = before.vertex
    if graph.is_sink(vertex):
        raise InputError(f"cannot bid at sink vertex {vertex!r}")
    bid_1 = _bid_of(graph, tender_1, vertex, before.budget_1, history, 1)
    bid_2 = _bid_of(graph, tender_2, vertex, before.budget_2, history, 2)
    for bid, budget, who in ((bid_1, before.budget_1, 1), (bid_2, before.budget_2, 2)):
        if bid < 0 or bid > budget:
            raise InputError(f"tender {who} bid {bid} outside [0, {budget}]")
    if bid_1 >= bid_2:
        winner, mover = 1, tender_1
        budget_1_after = before.budget_1 - bid_1
    else:
        winner, mover = 2, tender_2
        budget_1_after = before.budget_1 + bid_2
    next_vertex = _action_of(graph, mover, vertex, history)
    if next_vertex not in graph.successors(vertex):
        raise InputError(f"action {vertex!r} -> {next_vertex!r} is not an edge")
    after = Configuration(next_vertex, budget_1_after)
    return TraceRecord(len(history.records), before, bid_1, bid_2, winner, next_vertex, after)


def run_composition(
    graph: Graph,
    tender_1: Tender,
    tender_2: Tender,
    initial_budget_1,
    max_steps: int | None = None,
    objectives: dict[str, Objective] | None = None,
) -> tuple[list[TraceRecord], dict[str, Verdict]]:
    """Run the composition from the initial vertex until a sink or the horizon.

    Compatibility of the split is not enforced; the caller may probe
    hopeless budgets on purpose and read the verdicts.
    """
    require_valid(graph)
    budget = parse_fraction(initial_budget_1)
    if max_steps is None:
        max_steps = 10 * len(graph.vertices)
    history = History(Configuration(graph.initial, budget))
    while len(history.records) < max_steps and not graph.is_sink(history.current().vertex):
        history.records.append(compose_step(graph, tender_1, tender_2, history))
    verdicts = {
        name: check_objective(history.records, objective, graph, initial=graph.initial)
        for name, objective in (objectives or {}).items()
    }
    return history.records, verdicts


def check_objective(
    trace: list[TraceRecord],
    objective: Objective,
    graph: Graph,
    initial: str | None = None,
) -> Verdict:
    """Finite-horizon verdict; conservative about truncation.

    Reach and safety can settle definitively; Büchi/parity Satisfied needs
    the play to have settled in a bottom SCC with even dominant color and
    at least three visits to its dominant vertices after entry, anything
    less staying Undetermined.
    """
    if trace:
        vseq = [trace[0].config_before.vertex] + [r.next_vertex for r in trace]
    elif initial is not None:
        vseq = [initial]
    else:
        raise InputError("empty trace and no initial vertex")

    if objective.kind == REACH:
        for i, v in enumerate(vseq):
            if v in objective.vertex_set:
                return Verdict(SATISFIED, f"reached {v!r} at step {i}")
        if graph.is_sink(vseq[-1]):
            return Verdict(VIOLATED, f"play ended at non-target sink {vseq[-1]!r}")
        return Verdict(UNDETERMINED, "horizon reached without a target visit")

    if objective.kind == SAFETY:
        for i, v in enumerate(vseq):
            if v not in objective.vertex_set:
                return Verdict(VIOLATED, f"unsafe vertex {v!r} at step {i}")
        if graph.is_sink(vseq[-1]):
            return Verdict(SATISFIED, f"trapped at safe sink {vseq[-1]!r}")
        return Verdict(UNDETERMINED, "horizon reached inside the safe set")

    if objective.kind in (BUCHI, PARITY):
        decomposition = _decomposition(graph)
        comp_id = decomposition.component_of[vseq[-1]]
        if not decomposition.is_bottom[comp_id]:
            return Verdict(UNDETERMINED, "play has not settled in a bottom component")
        comp = decomposition.components[comp_id]
        top_color = max(objective.color_of(v) for v in comp)
        if top_color % 2 != 0:
            return Verdict(UNDETERMINED, "settled component's dominant color is odd")
        dominant = {v for v in comp if objective.color_of(v) == top_color}
        entry = 0
        for i in range(len(vseq) - 1, -1, -1):
            if decomposition.component_of[vseq[i]] != comp_id:
                entry = i + 1
                break
        visits = sum(1 for v in vseq[entry:] if v in dominant)
        if visits >= 3:
            return Verdict(SATISFIED, f"{visits} dominant visits after settling")
        return Verdict(UNDETERMINED, f"only {visits} dominant visits after settling")

    raise InputError(f"no verdict rule for {objective.kind} objectives")


def adversary_tender(
    kind: str,
    seed: int = 0,
    graph: Graph | None = None,
    objective: Objective | None = None,
    config: SolverConfig | None = None,
) -> Tender:
    """Opponent tenders for robustness runs.

    random bids a seeded uniform fraction of its budget and moves randomly;
    zero always bids 0 and takes the first successor; greedy stakes its
    whole budget on the first auction and then bids 0; spoiler solves the
    complementary game for the given objective and plays its robust tender,
    steering toward the threshold-maximizing successor.
    """
    if kind == "random":

        def bid_rule(_graph, _vertex, budget, history):
            draw = random.Random(seed * 1_000_003 + 2 * len(history.records)).random()
            return Fraction(*draw.as_integer_ratio()) * budget

        def action_rule(graph_, vertex, history):
            rng = random.Random(seed * 1_000_003 + 2 * len(history.records) + 1)
            return rng.choice(graph_.successors(vertex))

        return Tender(ZERO, {}, {}, bid_rule=bid_rule, action_rule=action_rule)

    if kind == "zero":
        return Tender(
            ZERO,
            {},
            {},
            bid_rule=lambda *_: ZERO,
            action_rule=lambda graph_, vertex, _history: graph_.successors(vertex)[0],
        )

    if kind == "greedy":

        def greedy_bid(_graph, _vertex, budget, history):
            return budget if not history.records else ZERO

        return Tender(
            ZERO,
            {},
            {},
            bid_rule=greedy_bid,
            action_rule=lambda graph_, vertex, _history: graph_.successors(vertex)[0],
        )

    if kind == "spoiler":
        if graph is None or objective is None:
            raise InputError("spoiler adversary requires a graph and an objective")
        th_map = solve_objective(graph, objective, config)
        values = {v: ONE - x for v, x in th_map.values.items()}
        witness = {v: (wp, wm) for v, (wm, wp) in th_map.witness.items()}
        complement = ThresholdMap(values, witness)
        action = {v: wp for v, (_wm, wp) in th_map.witness.items()}
        base_bid = {
            v: (th_map.value(wp) - th_map.value(wm)) / 2
            for v, (wm, wp) in th_map.witness.items()
        }
        return Tender(values[graph.initial], action, base_bid, complement)

    raise InputError(f"unknown adversary kind {kind!r}; pick one of {ADVERSARY_KINDS}")


def default_split(budget_1, budget_2) -> Fraction:
    """Tender 1's initial budget with the compatibility slack split evenly."""
    b1, b2 = parse_fraction(budget_1), parse_fraction(budget_2)
    slack = ONE - b1 - b2
    if slack <= 0:
        raise InputError(f"threshold budgets {b1} + {b2} leave no slack")
    return b1 + slack / 2


def compatibility_epsilon(budget_1, budget_2) -> Fraction:
    """A hundredth of each side's share of the compatibility slack."""
    b1, b2 = parse_fraction(budget_1), parse_fraction(budget_2)
    slack = ONE - b1 - b2
    if slack <= 0:
        raise InputError(f"threshold budgets {b1} + {b2} leave no slack")
    return slack / 2 / 100


def _configuration_to_json(config: Configuration) -> dict:
    return {"vertex": config.vertex, "budget_1": format_fraction(config.budget_1)}


def _configuration_from_json(data: dict) -> Configuration:
    return Configuration(str(data["vertex"]), parse_fraction(data["budget_1"]))


def trace_record_to_json(record: TraceRecord) -> dict:
    return {
        "step": record.step,
        "config_before": _configuration_to_json(record.config_before),
        "bid_1": format_fraction(record.bid_1),
        "bid_2": format_fraction(record.bid_2),
        "winner": record.winner,
        "next_vertex": record.next_vertex,
        "config_after": _configuration_to_json(record.config_after),
    }


def trace_record_from_json(data: dict) -> TraceRecord:
    try:
        return TraceRecord(
            step=int(data["step"]),
            config_before=_configuration_from_json(data["config_before"]),
            bid_1=parse_fraction(data["bid_1"]),
            bid_2=parse_fraction(data["bid_2"]),
            winner=int(data["winner"]),
            next_vertex=str(data["next_vertex"]),
            config_after=_configuration_from_json(data["config_after"]),
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed trace record JSON: {exc}") from exc


def write_trace_jsonl(trace: list[TraceRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in trace:
            handle.write(json.dumps(trace_record_to_json(record)) + "\n")


def read_trace_jsonl(path) -> list[TraceRecord]:
    records = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(trace_record_from_json(json.loads(line)))
    return records


def write_trace_csv(trace: list[TraceRecord], path) -> None:
    """Plot-friendly projection: budgets as floats, one row per step."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["step", "vertex", "bid1", "bid2", "winner", "budget1"])
        for record in trace:
            writer.writerow(
                [
                    record.step,
                    record.config_before.vertex,
                    float(record.bid_1),
                    float(record.bid_2),
                    record.winner,
                    float(record.config_after.budget_1),
                ]
            )


def verdicts_to_json(verdicts: dict[str, Verdict]) -> dict:
    return {name: {"status": v.status, "reason": v.reason} for name, v in verdicts.items()}
