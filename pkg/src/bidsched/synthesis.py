"""Tender construction and the three decentralized synthesis regimes.

A tender is one objective's complete playbook: a threshold budget, a
memoryless action table, and a base bidding table. Synthesis solves each
objective independently and succeeds when the two threshold budgets at the
initial vertex sum to less than one; the admissible and contract-based
regimes first prune the graph to enlarge the set of solvable instances.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import InputError, PrunedStartError, SolverError
from .graphs import (
    BUCHI,
    PARITY,
    REACH,
    Graph,
    Objective,
    is_binary,
    reachable_from,
    reachable_to,
    require_valid,
    scc_decompose,
    sinkify,
)
from .rational import format_fraction, parse_fraction
from .thresholds import (
    HALF,
    ONE,
    ZERO,
    SolverConfig,
    ThresholdMap,
    solve_objective,
    solve_parity,
    solve_reach,
)

logger = logging.getLogger(__name__)

SUCCESS = "Success"
FAIL = "Fail"

MODE_STRONG = "strong"
MODE_AA = "aa"
MODE_AG = "ag"

NON_BINARY_FLAG = "sound, completeness unknown"


@dataclass(frozen=True)
class Tender:
    """⟨action table, bidding table, threshold budget⟩ for one objective.

    `action` maps each non-sink vertex to the successor minimizing the
    threshold; `base_bid` holds half the threshold gap between the extreme
    successors. Adversarial tenders may override behavior through the
    rule callables, which never serialize.
    """

    threshold_budget: Fraction
    action: dict[str, str]
    base_bid: dict[str, Fraction]
    th_map: ThresholdMap | None = None
    gamma: Fraction = Fraction(1, 2)
    bid_rule: Callable | None = field(default=None, compare=False, repr=False)
    action_rule: Callable | None = field(default=None, compare=False, repr=False)


def make_tender(graph: Graph, th_map: ThresholdMap) -> Tender:
    """Derive the robust tender of a threshold map.

    The budget is th(v0); at each vertex the tender heads for the
    minimizing witness and bids half the gap between the extreme
    successors, which is exactly what keeps the budget above the
    threshold of the next vertex whichever way the auction goes.
    """
    budget = th_map.value(graph.initial)
    if budget >= 1:
        raise SolverError(
            f"threshold at {graph.initial!r} is {budget}; no winning tender exists"
        )
    action: dict[str, str] = {}
    base_bid: dict[str, Fraction] = {}
    for v in graph.vertices:
        if graph.is_sink(v):
            continue
        v_minus, v_plus = th_map.witness[v]
        action[v] = v_minus
        gap = HALF * (th_map.value(v_plus) - th_map.value(v_minus))
        if gap < 0 or gap > HALF:
            raise SolverError(f"base bid out of range at {v}: {gap}")
        if th_map.value(v) < 1 and th_map.value(v_minus) > th_map.value(v):
            raise SolverError(f"action at {v} increases the threshold")
        base_bid[v] = gap
    return Tender(budget, action, base_bid, th_map)


def tender_to_json(tender: Tender) -> dict:
    return {
        "budget": format_fraction(tender.threshold_budget),
        "action": dict(sorted(tender.action.items())),
        "bid": {v: format_fraction(b) for v, b in sorted(tender.base_bid.items())},
        "gamma": format_fraction(tender.gamma),
    }


def tender_from_json(data: dict) -> Tender:
    try:
        return Tender(
            threshold_budget=parse_fraction(data["budget"]),
            action={str(v): str(s) for v, s in data["action"].items()},
            base_bid={str(v): parse_fraction(b) for v, b in data["bid"].items()},
            gamma=parse_fraction(data.get("gamma", "1/2")),
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed tender JSON: {exc}") from exc


@dataclass(frozen=True)
class SynthesisOutcome:
    """Decision plus everything needed to replay it.

    `graph` is the arena the tenders actually play on (the original graph,
    a pruned subgraph, or a sinkified product); `kept_vertices` lists its
    vertices for reporting against the input graph.
    """

    mode: str
    status: str
    threshold_1: Fraction
    threshold_2: Fraction
    graph: Graph
    tenders: tuple[Tender, Tender] | None = None
    reason: str = ""
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.status == SUCCESS:
            if self.tenders is None:
                raise SolverError("Success outcome without tenders")
            if self.threshold_1 + self.threshold_2 >= 1:
                raise SolverError("Success outcome with incompatible budgets")

    @property
    def kept_vertices(self) -> tuple[str, ...]:
        return self.graph.vertices


def outcome_to_json(outcome: SynthesisOutcome) -> dict:
    data = {
        "mode": outcome.mode,
        "status": outcome.status,
        "threshold_1": format_fraction(outcome.threshold_1),
        "threshold_2": format_fraction(outcome.threshold_2),
        "subgraph": list(outcome.kept_vertices),
        "reason": outcome.reason,
        "flags": list(outcome.flags),
    }
    if outcome.tenders is not None:
        data["tender_1"] = tender_to_json(outcome.tenders[0])
        data["tender_2"] = tender_to_json(outcome.tenders[1])
    return data


@dataclass(frozen=True)
class Contract:
    """Vertex-safety assumption pair: each side promises to avoid a set."""

    forbidden_1: frozenset[str] = frozenset()
    forbidden_2: frozenset[str] = frozenset()

    @staticmethod
    def avoid(forbidden_1, forbidden_2) -> Contract:
        return Contract(frozenset(forbidden_1), frozenset(forbidden_2))


def contract_to_json(contract: Contract) -> dict:
    return {
        "forbidden_1": sorted(contract.forbidden_1),
        "forbidden_2": sorted(contract.forbidden_2),
    }


def contract_from_json(data: dict) -> Contract:
    try:
        return Contract.avoid(
            [str(v) for v in data.get("forbidden_1", [])],
            [str(v) for v in data.get("forbidden_2", [])],
        )
    except (TypeError, AttributeError) as exc:
        raise InputError(f"malformed contract JSON: {exc}") from exc


def _prepare_reach_pair(
    graph: Graph, objective_1: Objective, objective_2: Objective
) -> tuple[Graph, Objective, Objective]:
    """Reduce two Reach objectives to sink-target form when needed."""
    t1, t2 = objective_1.vertex_set, objective_2.vertex_set
    if all(graph.is_sink(t) for t in t1 | t2):
        return graph, objective_1, objective_2
    product = sinkify(graph, objective_1, objective_2)
    return product.graph, product.reach_1, product.reach_2


def _solve_pair(
    graph: Graph,
    objective_1: Objective,
    objective_2: Objective,
    config: SolverConfig | None,
) -> tuple[Graph, Objective, Objective, ThresholdMap, ThresholdMap]:
    kinds = {objective_1.kind, objective_2.kind}
    if kinds == {REACH}:
        arena, obj_1, obj_2 = _prepare_reach_pair(graph, objective_1, objective_2)
        map_1 = solve_reach(arena, obj_1.vertex_set, config)
        map_2 = solve_reach(arena, obj_2.vertex_set, config)
        return arena, obj_1, obj_2, map_1, map_2
    if kinds <= {BUCHI, PARITY}:
        map_1 = solve_parity(graph, objective_1, config)
        map_2 = solve_parity(graph, objective_2, config)
        return graph, objective_1, objective_2, map_1, map_2
    if REACH in kinds:
        reach_obj = objective_1 if objective_1.kind == REACH else objective_2
        if not all(graph.is_sink(t) for t in reach_obj.vertex_set):
            raise InputError(
                "mixing Reach with Büchi/parity requires the Reach targets to be sinks"
            )
        map_1 = solve_objective(graph, objective_1, config)
        map_2 = solve_objective(graph, objective_2, config)
        return graph, objective_1, objective_2, map_1, map_2
    raise InputError(f"unsupported objective kinds {sorted(kinds)}")


def synth_strong(
    graph: Graph,
    objective_1: Objective,
    objective_2: Objective,
    config: SolverConfig | None = None,
    mode: str = MODE_STRONG,
) -> SynthesisOutcome:
    """Decide whether a compatible pair of robust tenders exists outright.

    Each objective is solved independently; a pair exists iff the two
    thresholds at the initial vertex sum below 1, in which case the two
    robust tenders are returned.
    """
    require_valid(graph)
    objective_1.check_against(graph)
    objective_2.check_against(graph)
    arena, obj_1, obj_2, map_1, map_2 = _solve_pair(graph, objective_1, objective_2, config)
    th_1 = map_1.value(arena.initial)
    th_2 = map_2.value(arena.initial)
    if th_1 + th_2 < 1:
        tenders = (make_tender(arena, map_1), make_tender(arena, map_2))
        return SynthesisOutcome(mode, SUCCESS, th_1, th_2, arena, tenders)
    return SynthesisOutcome(
        mode,
        FAIL,
        th_1,
        th_2,
        arena,
        reason=(
            f"threshold sum {format_fraction(th_1)} + {format_fraction(th_2)} "
            f"at {arena.initial!r} is not below 1"
        ),
    )


def las_reach(graph: Graph, targets_1, targets_2) -> Graph:
    """Largest admissible subgraph for two sink-target Reach objectives.

    A vertex has threshold 1 for a sink-target objective exactly when no
    path from it reaches the targets, so the vertices that are hopeless
    for both objectives fall out of two backward searches; removing them
    (with incident edges) is the whole pruning.
    """
    require_valid(graph)
    t1, t2 = set(targets_1), set(targets_2)
    non_sink = [t for t in sorted(t1 | t2) if not graph.is_sink(t)]
    if non_sink:
        raise InputError(f"las_reach requires sink targets; offending: {non_sink}")
    keep = reachable_to(graph, t1) | reachable_to(graph, t2)
    if graph.initial not in keep:
        raise PrunedStartError(
            f"initial vertex {graph.initial!r} is hopeless for both objectives"
        )
    return graph.induced_subgraph(keep)


def synth_assume_admissible_reach(
    graph: Graph,
    targets_1,
    targets_2,
    config: SolverConfig | None = None,
) -> SynthesisOutcome:
    """Assume-admissible synthesis for two sink-target Reach objectives.

    Both sides may rely on the other never playing a dominated action, so
    the game is re-solved on the largest admissible subgraph. On binary
    graphs with overlapping targets this always succeeds; on non-binary
    graphs the answer is sound but flagged, completeness being open.
    """
    t1, t2 = frozenset(targets_1), frozenset(targets_2)
    subgraph = las_reach(graph, t1, t2)
    outcome = synth_strong(
        subgraph,
        Objective.reach(t1 & set(subgraph.vertices)),
        Objective.reach(t2 & set(subgraph.vertices)),
        config,
        mode=MODE_AA,
    )
    flags = outcome.flags if is_binary(subgraph) else outcome.flags + (NON_BINARY_FLAG,)
    return SynthesisOutcome(
        MODE_AA,
        outcome.status,
        outcome.threshold_1,
        outcome.threshold_2,
        outcome.graph,
        outcome.tenders,
        outcome.reason,
        flags,
    )


def las_buchi(graph: Graph, accepting_1, accepting_2) -> Graph:
    """Largest admissible subgraph for two Büchi objectives.

    Repeatedly strips bottom SCCs that cannot host an accepting infinite
    play (no internal edge, or no accepting vertex of either objective);
    stripping may strand further vertices, hence the iteration. In the
    result every vertex can still steer into some admissible bottom SCC.
    """
    require_valid(graph)
    accepting = set(accepting_1) | set(accepting_2)
    current = graph
    while True:
        decomposition = scc_decompose(current)
        doomed: set[str] = set()
        for i, comp in enumerate(decomposition.components):
            if not decomposition.is_bottom[i]:
                continue
            live = any(s in comp for v in comp for s in current.successors(v))
            if not live or not (comp & accepting):
                doomed |= comp
        if not doomed:
            return current
        keep = set(current.vertices) - doomed
        if graph.initial not in keep:
            raise PrunedStartError(
                f"initial vertex {graph.initial!r} cannot avoid doomed components"
            )
        current = current.induced_subgraph(keep)


def reachability_core(
    subgraph: Graph, accepting_1, accepting_2
) -> tuple[frozenset[str], frozenset[str]]:
    """Per-objective unions of the subgraph's bottom SCCs that contain an
    accepting vertex of that objective."""
    a1, a2 = set(accepting_1), set(accepting_2)
    decomposition = scc_decompose(subgraph)
    core_1: set[str] = set()
    core_2: set[str] = set()
    for i, comp in enumerate(decomposition.components):
        if not decomposition.is_bottom[i]:
            continue
        if comp & a1:
            core_1 |= comp
        if comp & a2:
            core_2 |= comp
    return frozenset(core_1), frozenset(core_2)


def synth_assume_admissible_buchi(
    graph: Graph,
    accepting_1,
    accepting_2,
    config: SolverConfig | None = None,
) -> SynthesisOutcome:
    """Assume-admissible synthesis for two Büchi objectives.

    On the admissible subgraph, a compatible pair exists iff the two
    reachability cores intersect; the tenders then race to the shared
    core and switch to the zero-threshold pursuit policy inside it.
    """
    a1, a2 = frozenset(accepting_1), frozenset(accepting_2)
    subgraph = las_buchi(graph, a1, a2)
    flags = () if is_binary(subgraph) else (NON_BINARY_FLAG,)
    objective_1 = Objective.buchi(a1 & set(subgraph.vertices))
    objective_2 = Objective.buchi(a2 & set(subgraph.vertices))
    core_1, core_2 = reachability_core(subgraph, objective_1.vertex_set, objective_2.vertex_set)
    map_1 = solve_parity(subgraph, objective_1, config)
    map_2 = solve_parity(subgraph, objective_2, config)
    th_1 = map_1.value(subgraph.initial)
    th_2 = map_2.value(subgraph.initial)
    if not core_1 & core_2:
        return SynthesisOutcome(
            MODE_AA,
            FAIL,
            th_1,
            th_2,
            subgraph,
            reason="reachability cores are disjoint",
            flags=flags,
        )
    if th_1 + th_2 >= 1:
        return SynthesisOutcome(
            MODE_AA,
            FAIL,
            th_1,
            th_2,
            subgraph,
            reason=(
                f"threshold sum {format_fraction(th_1)} + {format_fraction(th_2)} "
                "is not below 1"
            ),
            flags=flags,
        )
    tenders = (make_tender(subgraph, map_1), make_tender(subgraph, map_2))
    return SynthesisOutcome(MODE_AA, SUCCESS, th_1, th_2, subgraph, tenders, flags=flags)


def contract_subgraph(graph: Graph, contract: Contract) -> Graph:
    """Largest subgraph on which both vertex-safety assumptions hold.

    For assumptions of the form "always avoid X" the construction is the
    induced subgraph away from both forbidden sets: its paths are exactly
    the original paths that satisfy both assumptions.
    """
    require_valid(graph)
    forbidden = set(contract.forbidden_1) | set(contract.forbidden_2)
    if graph.initial in forbidden:
        raise PrunedStartError(f"initial vertex {graph.initial!r} is forbidden by the contract")
    return graph.induced_subgraph(set(graph.vertices) - forbidden)


def synth_assume_guarantee(
    graph: Graph,
    objective_1: Objective,
    objective_2: Objective,
    contract: Contract,
    config: SolverConfig | None = None,
) -> SynthesisOutcome:
    """Contract-based synthesis: solve strongly on the contract subgraph.

    Tenders synthesized there never leave it, so each side fulfills its
    own promise while enjoying the other's; an empty contract degenerates
    to plain strong synthesis.
    """
    subgraph = contract_subgraph(graph, contract)
    kept = set(subgraph.vertices)
    for name, objective in (("objective 1", objective_1), ("objective 2", objective_2)):
        if objective.kind != PARITY and objective.vertex_set and not (objective.vertex_set & kept):
            raise InputError(f"the contract prunes every target of {name}")
    outcome = synth_strong(
        subgraph,
        objective_1.restricted(kept),
        objective_2.restricted(kept),
        config,
        mode=MODE_AG,
    )
    return outcome


def synthesize(
    graph: Graph,
    objective_1: Objective,
    objective_2: Objective,
    mode: str = MODE_STRONG,
    contract: Contract | None = None,
    config: SolverConfig | None = None,
) -> SynthesisOutcome:
    """Single entry point over the three regimes, keyed by mode name.

    For assume-admissible Reach the objectives are first reduced to
    sink-target form so pruning applies to arbitrary target sets.
    """
    require_valid(graph)
    objective_1.check_against(graph)
    objective_2.check_against(graph)
    if mode == MODE_STRONG:
        return synth_strong(graph, objective_1, objective_2, config)
    if mode == MODE_AA:
        kinds = {objective_1.kind, objective_2.kind}
        if kinds == {REACH}:
            arena, obj_1, obj_2 = _prepare_reach_pair(graph, objective_1, objective_2)
            return synth_assume_admissible_reach(
                arena, obj_1.vertex_set, obj_2.vertex_set, config
            )
        if kinds == {BUCHI}:
            return synth_assume_admissible_buchi(
                graph, objective_1.vertex_set, objective_2.vertex_set, config
            )
        raise InputError("assume-admissible mode handles Reach pairs or Büchi pairs")
    if mode == MODE_AG:
        if contract is None:
            raise InputError("assume-guarantee mode requires a contract")
        return synth_assume_guarantee(graph, objective_1, objective_2, contract, config)
    raise InputError(f"unknown synthesis mode {mode!r}")


def objectives_overlap(graph: Graph, objective_1: Objective, objective_2: Objective) -> bool:
    """Diagnostic: does some single path satisfy both objectives?

    Not enforced anywhere; the synthesis guarantees presuppose overlap and
    callers may deliberately probe non-overlapping inputs.
    """
    require_valid(graph)
    kinds = {objective_1.kind, objective_2.kind}
    if kinds == {REACH}:
        product = sinkify(graph, objective_1, objective_2)
        joint = product.reach_1.vertex_set & product.reach_2.vertex_set
        return bool(reachable_from(product.graph) & joint)
    if kinds == {BUCHI}:
        reachable = reachable_from(graph)
        decomposition = scc_decompose(graph)
        for comp in decomposition.components:
            live = any(s in comp for v in comp for s in graph.successors(v))
            if not live or not (comp & reachable):
                continue
            if comp & objective_1.vertex_set and comp & objective_2.vertex_set:
                return True
        return False
    raise InputError("overlap diagnostic supports Reach pairs or Büchi pairs")
