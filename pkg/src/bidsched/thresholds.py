"""Threshold budgets for auction-based token games.

The threshold th(v) is the least budget from which the objective can be
forced from v no matter how the opponent bids. On sink-target reachability
instances it is the unique map with th = 0 on targets, 1 on other sinks,
1 on vertices with no path to a target, and elsewhere the local average

    th(v) = (th(v_plus) + th(v_minus)) / 2

over a maximizing successor v_plus and a minimizing successor v_minus.
Parity (and Büchi, encoded as colors 2/1) reduces to reachability toward
the winning bottom SCCs.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, OracleError, SolverError
from .graphs import (
    BUCHI,
    PARITY,
    Graph,
    Objective,
    reachable_to,
    require_valid,
    scc_decompose,
    sinkify,
)
from .rational import SingularSystem, format_fraction, parse_fraction, solve_linear_system

logger = logging.getLogger(__name__)

EXACT = "exact"
ITERATIVE = "iterative"

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)

_ORACLE_VERTEX_LIMIT = 12
_ORACLE_ASSIGNMENT_LIMIT = 200_000
_STRATEGY_ROUNDS = 200


@dataclass(frozen=True)
class SolverConfig:
    mode: str = EXACT
    tolerance: float = 1e-9
    max_iterations: int = 100_000

    def __post_init__(self) -> None:
        if self.mode not in (EXACT, ITERATIVE):
            raise InputError(f"unknown solver mode {self.mode!r}")
        if not self.tolerance > 0:
            raise InputError("tolerance must be positive")
        if self.max_iterations < 1:
            raise InputError("max_iterations must be at least 1")


@dataclass(frozen=True)
class ThresholdMap:
    """Vertex thresholds plus the (v_minus, v_plus) witness per non-sink vertex."""

    values: dict[str, Fraction]
    witness: dict[str, tuple[str, str]]

    def value(self, vertex: str) -> Fraction:
        return self.values[vertex]

    def v_minus(self, vertex: str) -> str:
        return self.witness[vertex][0]

    def v_plus(self, vertex: str) -> str:
        return self.witness[vertex][1]


def threshold_map_to_json(th_map: ThresholdMap) -> dict:
    return {
        "values": {v: format_fraction(x) for v, x in sorted(th_map.values.items())},
        "witness": {v: list(w) for v, w in sorted(th_map.witness.items())},
    }


def threshold_map_from_json(data: dict) -> ThresholdMap:
    try:
        values = {str(v): parse_fraction(x) for v, x in data["values"].items()}
        witness = {str(v): (str(w[0]), str(w[1])) for v, w in data["witness"].items()}
    except (KeyError, TypeError, IndexError) as exc:
        raise InputError(f"malformed threshold map JSON: {exc}") from exc
    return ThresholdMap(values, witness)


def _check_sink_targets(graph: Graph, targets: set[str]) -> None:
    stray = targets - set(graph.vertices)
    if stray:
        raise InputError(f"targets outside the graph: {sorted(stray)}")
    non_sink = [t for t in sorted(targets) if not graph.is_sink(t)]
    if non_sink:
        raise InputError(
            f"non-sink targets {non_sink}; reduce with sinkify or solve_reach_general"
        )


def _pinned_values(graph: Graph, targets: set[str]) -> tuple[dict[str, Fraction], list[str]]:
    """Boundary plus the qualitative pre-pass; returns (pinned, free vertices)."""
    can_reach = reachable_to(graph, targets)
    pinned: dict[str, Fraction] = {}
    free: list[str] = []
    for v in graph.vertices:
        if v in targets:
            pinned[v] = ZERO
        elif v not in can_reach:
            pinned[v] = ONE
        else:
            free.append(v)
    return pinned, free


def progress_ranks(
    graph: Graph,
    values: dict[str, Fraction],
    targets: set[str],
) -> dict[str, int]:
    """Distance-to-target through minimizing successors.

    rank(t) = 0 on targets; otherwise rank(v) = 1 + min rank over the
    successors that attain min th. Every vertex with th < 1 gets a finite
    rank; picking v_minus by minimal rank makes the action map loop-free,
    which a plain first-argmin rule does not guarantee on threshold plateaus.
    """
    argmin_succ: dict[str, list[str]] = {}
    for v in graph.vertices:
        succs = graph.successors(v)
        if not succs:
            continue
        low = min(values[s] for s in succs)
        argmin_succ[v] = [s for s in succs if values[s] == low]

    rank: dict[str, int] = {t: 0 for t in targets}
    frontier = [t for t in targets]
    preds: dict[str, list[str]] = {v: [] for v in graph.vertices}
    for v, succs in argmin_succ.items():
        for s in succs:
            preds[s].append(v)
    while frontier:
        next_frontier: list[str] = []
        for s in frontier:
            for v in preds[s]:
                if v not in rank:
                    rank[v] = rank[s] + 1
                    next_frontier.append(v)
        frontier = next_frontier
    return rank


def _select_witnesses(
    graph: Graph,
    values: dict[str, Fraction],
    targets: set[str],
) -> dict[str, tuple[str, str]]:
    ranks = progress_ranks(graph, values, targets)
    witness: dict[str, tuple[str, str]] = {}
    big = len(graph.vertices) + 1
    for v in graph.vertices:
        succs = graph.successors(v)
        if not succs:
            continue
        high = max(values[s] for s in succs)
        low = min(values[s] for s in succs)
        v_plus = next(s for s in succs if values[s] == high)
        candidates = [s for s in succs if values[s] == low]
        v_minus = min(candidates, key=lambda s: ranks.get(s, big))
        witness[v] = (v_minus, v_plus)
    return witness


def _solve_binary_exact(
    graph: Graph, pinned: dict[str, Fraction], free: list[str]
) -> dict[str, Fraction]:
    """One rational linear solve; valid when every free vertex has <= 2 successors.

    With at most two successors both of them are the witness pair, so the
    averaging equation is already linear without any min/max choice.
    """
    index = {v: i for i, v in enumerate(free)}
    n = len(free)
    matrix = [[ZERO] * n for _ in range(n)]
    rhs = [ZERO] * n
    for v in free:
        i = index[v]
        matrix[i][i] = ONE
        succs = graph.successors(v)
        weight = ONE if len(succs) == 1 else HALF
        for s in succs:
            if s in pinned:
                rhs[i] += weight * pinned[s]
            else:
                matrix[i][index[s]] -= weight
    try:
        solution = solve_linear_system(matrix, rhs)
    except SingularSystem as exc:
        raise SolverError(f"binary threshold system is singular: {exc}") from exc
    values = dict(pinned)
    for v in free:
        values[v] = solution[index[v]]
    return values


def _evaluate_witness(
    graph: Graph,
    pinned: dict[str, Fraction],
    free: list[str],
    witness: dict[str, tuple[str, str]],
) -> dict[str, Fraction]:
    """Exact value of a fixed witness pair; plays trapped away from any
    boundary vertex are worth 1 (the objective is never reached there)."""
    preds: dict[str, list[str]] = {v: [] for v in free}
    for v in free:
        for s in set(witness[v]):
            if s in preds:
                preds[s].append(v)
    reaches_boundary = {v for v in free if any(s in pinned for s in witness[v])}
    frontier = list(reaches_boundary)
    while frontier:
        s = frontier.pop()
        for p in preds[s]:
            if p not in reaches_boundary:
                reaches_boundary.add(p)
                frontier.append(p)

    solvable = [v for v in free if v in reaches_boundary]
    fixed = dict(pinned)
    for v in free:
        if v not in reaches_boundary:
            fixed[v] = ONE
    index = {v: i for i, v in enumerate(solvable)}
    n = len(solvable)
    matrix = [[ZERO] * n for _ in range(n)]
    rhs = [ZERO] * n
    for v in solvable:
        i = index[v]
        matrix[i][i] = ONE
        for s in witness[v]:
            if s in index:
                matrix[i][index[s]] -= HALF
            else:
                rhs[i] += HALF * fixed[s]
    try:
        solution = solve_linear_system(matrix, rhs)
    except SingularSystem as exc:
        raise SolverError(f"witness evaluation system is singular: {exc}") from exc
    values = dict(fixed)
    for v in solvable:
        values[v] = solution[index[v]]
    return values


def _strategy_iteration(
    graph: Graph,
    pinned: dict[str, Fraction],
    free: list[str],
    config: SolverConfig,
) -> dict[str, Fraction]:
    """Witness improvement for non-binary graphs, warm-started from value
    iteration so the first candidate is already near-optimal."""
    approx = _value_iteration(graph, pinned, free, 1e-9, config.max_iterations)
    witness: dict[str, tuple[str, str]] = {}
    for v in free:
        succs = graph.successors(v)
        low = min(approx[s] for s in succs)
        high = max(approx[s] for s in succs)
        wm = next(s for s in succs if approx[s] == low)
        wp = next(s for s in succs if approx[s] == high)
        witness[v] = (wm, wp)

    seen: set[tuple[tuple[str, str, str], ...]] = set()
    for _ in range(_STRATEGY_ROUNDS):
        signature = tuple((v, *witness[v]) for v in free)
        if signature in seen:
            raise SolverError("strategy iteration cycled without converging")
        seen.add(signature)
        values = _evaluate_witness(graph, pinned, free, witness)
        changed = False
        for v in free:
            succs = graph.successors(v)
            low = min(values[s] for s in succs)
            high = max(values[s] for s in succs)
            wm, wp = witness[v]
            if values[wm] != low:
                wm = next(s for s in succs if values[s] == low)
                changed = True
            if values[wp] != high:
                wp = next(s for s in succs if values[s] == high)
                changed = True
            witness[v] = (wm, wp)
        if not changed:
            return values
    raise SolverError("strategy iteration did not converge")


def _value_iteration(
    graph: Graph,
    pinned: dict[str, Fraction],
    free: list[str],
    tolerance: float,
    max_iterations: int,
) -> dict[str, float]:
    """From-above value iteration; the sequence is pointwise non-increasing."""
    vals: dict[str, float] = {v: float(x) for v, x in pinned.items()}
    for v in free:
        vals[v] = 1.0
    succ_lists = {v: graph.successors(v) for v in free}
    for _ in range(max_iterations):
        residual = 0.0
        for v in free:
            over = [vals[s] for s in succ_lists[v]]
            residual = max(residual, abs(vals[v] - 0.5 * (max(over) + min(over))))
        if residual < tolerance:
            return vals
        for v in free:
            over = [vals[s] for s in succ_lists[v]]
            updated = 0.5 * (max(over) + min(over))
            if updated > vals[v] + 1e-12:
                raise SolverError("value iteration lost monotonicity")
            vals[v] = min(vals[v], updated)
    raise SolverError(f"value iteration did not converge within {max_iterations} sweeps")


def _verify_map(
    graph: Graph,
    values: dict[str, Fraction],
    witness: dict[str, tuple[str, str]],
    targets: set[str],
    tolerance: Fraction,
) -> None:
    for v in graph.vertices:
        x = values[v]
        if x < 0 or x > 1:
            raise SolverError(f"threshold out of range at {v}: {x}")
        if v in targets and x != 0:
            raise SolverError(f"target {v} has nonzero threshold {x}")
        if not graph.is_sink(v):
            wm, wp = witness[v]
            residual = abs(x - HALF * (values[wm] + values[wp]))
            if residual > tolerance:
                raise SolverError(f"local averaging violated at {v}: residual {residual}")


def solve_reach(
    graph: Graph, targets, config: SolverConfig | None = None
) -> ThresholdMap:
    """Thresholds for Reach(targets) where every target is a sink."""
    config = config or SolverConfig()
    require_valid(graph)
    target_set = set(targets)
    _check_sink_targets(graph, target_set)
    pinned, free = _pinned_values(graph, target_set)

    if config.mode == ITERATIVE:
        floats = _value_iteration(graph, pinned, free, config.tolerance / 2, config.max_iterations)
        values = dict(pinned)
        for v in free:
            values[v] = Fraction(floats[v])
        residual_bound = Fraction(config.tolerance)
    elif not free:
        values = dict(pinned)
        residual_bound = ZERO
    elif all(len(graph.successors(v)) <= 2 for v in free):
        values = _solve_binary_exact(graph, pinned, free)
        residual_bound = ZERO
    else:
        values = _strategy_iteration(graph, pinned, free, config)
        residual_bound = ZERO

    witness = _select_witnesses(graph, values, target_set)
    _verify_map(graph, values, witness, target_set, residual_bound)
    return ThresholdMap(values, witness)


def solve_reach_general(
    graph: Graph, objective: Objective, config: SolverConfig | None = None
) -> ThresholdMap:
    """Reach thresholds when targets may have outgoing edges.

    A visit counts even if the play moves on, so the game is reduced to a
    sink-target one by pairing the objective with a copy of itself in the
    sinkify product and projecting the base copy back.
    """
    if objective.kind != "reach":
        raise InputError("solve_reach_general expects a Reach objective")
    objective.check_against(graph)
    if all(graph.is_sink(t) for t in objective.vertex_set):
        return solve_reach(graph, objective.vertex_set, config)

    product = sinkify(graph, objective, objective)
    product_map = solve_reach(product.graph, product.reach_1.vertex_set, config)
    suffix = "@⊥"
    values: dict[str, Fraction] = {}
    witness: dict[str, tuple[str, str]] = {}
    for v in graph.vertices:
        values[v] = product_map.values[v + suffix]
        pair = product_map.witness.get(v + suffix)
        if pair is not None:
            witness[v] = (product.back_map[pair[0]], product.back_map[pair[1]])
    return ThresholdMap(values, witness)


@dataclass(frozen=True)
class PursuitPlan:
    """Runtime guidance inside winning bottom SCCs of a parity game.

    `distance` counts steps to the next visit of a maximal-color vertex
    along the chosen pursuit successors; `targets` are those vertices.
    """

    member_of: dict[str, int]
    winning: frozenset[int]
    targets: frozenset[str]
    distance: dict[str, int]
    pursuit: dict[str, str]


def _bottom_analysis(graph: Graph, objective: Objective):
    decomposition = scc_decompose(graph)
    bottoms: list[tuple[int, frozenset[str]]] = [
        (i, comp)
        for i, comp in enumerate(decomposition.components)
        if decomposition.is_bottom[i]
    ]
    info = []
    for i, comp in bottoms:
        live = any(s in comp for v in comp for s in graph.successors(v))
        top_color = max(objective.color_of(v) for v in comp)
        info.append((i, comp, live and top_color % 2 == 0, top_color))
    return decomposition, info


def _pursuit_within(
    graph: Graph, component: frozenset[str], targets: set[str]
) -> tuple[dict[str, int], dict[str, str]]:
    """Distance to the next targets-visit along internal edges, plus the
    first successor attaining it; finite everywhere in a live bottom SCC."""
    score: dict[str, int] = {}
    distance: dict[str, int] = {}
    pursuit: dict[str, str] = {}
    pending = set(component)
    for _ in range(len(component) + 1):
        assigned = []
        for v in pending:
            best = None
            for s in graph.successors(v):
                if s not in component:
                    continue
                s_score = 0 if s in targets else score.get(s)
                if s_score is None:
                    continue
                if best is None or s_score < best[0]:
                    best = (s_score, s)
            if best is not None:
                distance[v] = best[0] + 1
                pursuit[v] = next(
                    s
                    for s in graph.successors(v)
                    if s in component
                    and (0 if s in targets else score.get(s, len(component) + 2)) == best[0]
                )
                assigned.append(v)
        for v in assigned:
            pending.discard(v)
            score[v] = distance[v]
        if not pending:
            break
    if pending:
        raise SolverError(f"pursuit targets unreachable inside component: {sorted(pending)}")
    return distance, pursuit


def pursuit_plan(graph: Graph, objective: Objective) -> PursuitPlan:
    if objective.kind not in (BUCHI, PARITY):
        raise InputError("pursuit plans exist for Büchi and parity objectives only")
    _, info = _bottom_analysis(graph, objective)
    member_of: dict[str, int] = {}
    winning: set[int] = set()
    targets: set[str] = set()
    distance: dict[str, int] = {}
    pursuit: dict[str, str] = {}
    for i, comp, wins, top_color in info:
        for v in comp:
            member_of[v] = i
        if not wins:
            continue
        winning.add(i)
        local_targets = {v for v in comp if objective.color_of(v) == top_color}
        targets |= local_targets
        dist, steps = _pursuit_within(graph, comp, local_targets)
        distance.update(dist)
        pursuit.update(steps)
    return PursuitPlan(member_of, frozenset(winning), frozenset(targets), distance, pursuit)


def solve_parity(
    graph: Graph, objective: Objective, config: SolverConfig | None = None
) -> ThresholdMap:
    """Parity/Büchi thresholds via the bottom-SCC reduction.

    Inside a bottom SCC the threshold is 0 when the maximal color is even
    and the component can sustain an infinite play, 1 otherwise; elsewhere
    it is the reach threshold toward the winning components, computed on
    the graph with every bottom SCC collapsed to a sink.
    """
    require_valid(graph)
    if objective.kind not in (BUCHI, PARITY):
        raise InputError("solve_parity expects a Büchi or parity objective")
    objective.check_against(graph)
    decomposition, info = _bottom_analysis(graph, objective)
    bottom_ids = {i for i, _, _, _ in info}
    in_bottom: dict[str, int] = {}
    for i, comp, _, _ in info:
        for v in comp:
            in_bottom[v] = i

    rep_name: dict[int, str] = {}
    taken = set(graph.vertices)
    for i, _, _, _ in info:
        name = f"bscc{i}"
        while name in taken:
            name = "_" + name
        taken.add(name)
        rep_name[i] = name

    outer = [v for v in graph.vertices if v not in in_bottom]
    reduced_vertices = outer + [rep_name[i] for i, _, _, _ in info]
    reduced_edges: dict[str, tuple[str, ...]] = {}
    first_original: dict[tuple[str, str], str] = {}
    for v in outer:
        mapped: list[str] = []
        for s in graph.successors(v):
            t = rep_name[in_bottom[s]] if s in in_bottom else s
            if t not in mapped:
                mapped.append(t)
                first_original[(v, t)] = s
        if mapped:
            reduced_edges[v] = tuple(mapped)
    reduced_initial = (
        rep_name[in_bottom[graph.initial]] if graph.initial in in_bottom else graph.initial
    )
    reduced = Graph(tuple(reduced_vertices), reduced_initial, reduced_edges)
    reach_targets = {rep_name[i] for i, _, wins, _ in info if wins}
    reduced_map = solve_reach(reduced, reach_targets, config)

    plan = pursuit_plan(graph, objective)
    values: dict[str, Fraction] = {}
    witness: dict[str, tuple[str, str]] = {}
    for v in graph.vertices:
        if v in in_bottom:
            comp_id = in_bottom[v]
            values[v] = ZERO if comp_id in plan.winning else ONE
            succs = graph.successors(v)
            if succs:
                v_minus = plan.pursuit.get(v, succs[0])
                witness[v] = (v_minus, succs[0])
        else:
            values[v] = reduced_map.values[v]
            wm, wp = reduced_map.witness[v]
            witness[v] = (
                first_original.get((v, wm), wm),
                first_original.get((v, wp), wp),
            )
    return ThresholdMap(values, witness)


def solve_objective(
    graph: Graph, objective: Objective, config: SolverConfig | None = None
) -> ThresholdMap:
    """Dispatch to the reach or parity solver by objective kind."""
    if objective.kind == "reach":
        return solve_reach_general(graph, objective, config)
    if objective.kind in (BUCHI, PARITY):
        return solve_parity(graph, objective, config)
    raise InputError(f"no threshold solver for {objective.kind} objectives")


def brute_force_oracle(graph: Graph, targets, objective_kind: str = "reach") -> ThresholdMap:
    """Independent check: enumerate witness pairs, solve, keep the consistent one.

    For every free vertex each unordered successor pair is a candidate
    witness (the averaging equation does not care which element minimizes).
    A solution is accepted when the chosen pair really attains min and max
    over all successors and every value lies in [0, 1]. `objective_kind`
    "safety" swaps the boundary: targets are losing, other sinks winning.
    """
    require_valid(graph)
    if len(graph.vertices) > _ORACLE_VERTEX_LIMIT:
        raise OracleError(f"oracle limited to {_ORACLE_VERTEX_LIMIT} vertices")
    target_set = set(targets)
    _check_sink_targets(graph, target_set)

    can_reach = reachable_to(graph, target_set)
    win, lose = (ZERO, ONE) if objective_kind == "reach" else (ONE, ZERO)
    pinned: dict[str, Fraction] = {}
    free: list[str] = []
    for v in graph.vertices:
        if v in target_set:
            pinned[v] = win
        elif v not in can_reach:
            pinned[v] = lose
        else:
            free.append(v)

    choices: list[list[tuple[str, str]]] = []
    count = 1
    for v in free:
        succs = graph.successors(v)
        pairs = (
            [(succs[0], succs[0])]
            if len(succs) == 1
            else [tuple(p) for p in itertools.combinations(succs, 2)]
        )
        choices.append(pairs)
        count *= len(pairs)
        if count > _ORACLE_ASSIGNMENT_LIMIT:
            raise OracleError("witness assignment space too large to enumerate")

    index = {v: i for i, v in enumerate(free)}
    for assignment in itertools.product(*choices):
        n = len(free)
        matrix = [[ZERO] * n for _ in range(n)]
        rhs = [ZERO] * n
        for v, (m, p) in zip(free, assignment):
            i = index[v]
            matrix[i][i] = ONE
            for s in (m, p):
                if s in pinned:
                    rhs[i] += HALF * pinned[s]
                else:
                    matrix[i][index[s]] -= HALF
        try:
            solution = solve_linear_system(matrix, rhs)
        except SingularSystem:
            continue
        values = dict(pinned)
        for v in free:
            values[v] = solution[index[v]]
        if any(x < 0 or x > 1 for x in values.values()):
            continue
        consistent = True
        witness: dict[str, tuple[str, str]] = {}
        for v, (m, p) in zip(free, assignment):
            succ_values = [values[s] for s in graph.successors(v)]
            pair = sorted((values[m], values[p]))
            if pair[0] != min(succ_values) or pair[1] != max(succ_values):
                consistent = False
                break
            witness[v] = (m, p) if values[m] <= values[p] else (p, m)
        if not consistent:
            continue
        for v in graph.vertices:
            if not graph.is_sink(v) and v not in witness:
                succs = graph.successors(v)
                witness[v] = (succs[0], succs[0])
        return ThresholdMap(values, witness)
    raise OracleError("no witness assignment yields a consistent solution")
