"""Synthesis regimes: tenders, strong, assume-admissible, assume-guarantee."""

from __future__ import annotations

from fractions import Fraction

import pytest

from bidsched import (
    FAIL,
    MODE_AA,
    MODE_AG,
    MODE_STRONG,
    NON_BINARY_FLAG,
    SUCCESS,
    Contract,
    InputError,
    Objective,
    PrunedStartError,
    SolverError,
    SynthesisOutcome,
    contract_from_json,
    contract_subgraph,
    contract_to_json,
    las_buchi,
    las_reach,
    make_graph,
    make_tender,
    objectives_overlap,
    outcome_to_json,
    reachability_core,
    solve_reach,
    synth_assume_admissible_buchi,
    synth_assume_admissible_reach,
    synth_assume_guarantee,
    synth_strong,
    synthesize,
    tender_from_json,
    tender_to_json,
)

from fixtures import (
    accepting_ring,
    bridge_contract,
    fork_bridge,
    fork_tight,
    fork_wide,
    random_overlap_instance,
    rival_loops,
)

Q = Fraction


def test_fork_blue_tender():
    graph, blue, _ = fork_wide()
    tender = make_tender(graph, solve_reach(graph, blue))
    assert tender.threshold_budget == Q(1, 4)
    assert tender.action["a"] == "b"
    assert tender.action["e"] == "g"
    assert tender.base_bid["a"] == Q(1, 4)
    assert tender.base_bid["e"] == Q(1, 2)
    assert tender.gamma == Q(1, 2)


def test_fork_red_tender_has_no_preference_at_start():
    graph, _, red = fork_wide()
    tender = make_tender(graph, solve_reach(graph, red))
    assert tender.threshold_budget == Q(1, 2)
    assert tender.base_bid["a"] == 0
    assert tender.action["b"] == "d"
    assert tender.action["e"] == "f"


def test_make_tender_refuses_hopeless_start():
    graph = make_graph(["a", "b", "t"], "a", [("a", "b")])
    th_map = solve_reach(graph, {"t"})
    with pytest.raises(SolverError):
        make_tender(graph, th_map)


def test_tender_json_round_trip():
    graph, blue, _ = fork_wide()
    tender = make_tender(graph, solve_reach(graph, blue))
    back = tender_from_json(tender_to_json(tender))
    assert back.threshold_budget == tender.threshold_budget
    assert back.action == tender.action
    assert back.base_bid == tender.base_bid
    assert back.gamma == tender.gamma
    assert back.th_map is None


def test_tender_json_malformed():
    with pytest.raises(InputError):
        tender_from_json({"budget": "1/4"})


def test_strong_wide_fork_succeeds():
    graph, blue, red = fork_wide()
    outcome = synth_strong(graph, Objective.reach(blue), Objective.reach(red))
    assert outcome.status == SUCCESS
    assert outcome.mode == MODE_STRONG
    assert (outcome.threshold_1, outcome.threshold_2) == (Q(1, 4), Q(1, 2))
    assert outcome.tenders is not None
    assert outcome.flags == ()
    assert set(outcome.kept_vertices) == set(graph.vertices)


def test_strong_tight_fork_fails_at_exactly_one():
    graph, blue, red = fork_tight()
    outcome = synth_strong(graph, Objective.reach(blue), Objective.reach(red))
    assert outcome.status == FAIL
    assert outcome.threshold_1 == Q(1, 2)
    assert outcome.threshold_2 == Q(1, 2)
    assert "not below 1" in outcome.reason
    assert outcome.tenders is None


def test_outcome_json_shape():
    graph, blue, red = fork_wide()
    outcome = synth_strong(graph, Objective.reach(blue), Objective.reach(red))
    data = outcome_to_json(outcome)
    assert data["mode"] == "strong"
    assert data["status"] == "Success"
    assert data["threshold_1"] == "1/4"
    assert data["threshold_2"] == "1/2"
    assert set(data["subgraph"]) == set("abcdefg")
    assert data["tender_1"]["budget"] == "1/4"
    assert data["tender_2"]["budget"] == "1/2"


def test_outcome_success_requires_tenders():
    graph, blue, red = fork_wide()
    outcome = synth_strong(graph, Objective.reach(blue), Objective.reach(red))
    with pytest.raises(SolverError):
        SynthesisOutcome(MODE_STRONG, SUCCESS, Q(1, 4), Q(1, 2), graph, None)
    with pytest.raises(SolverError):
        SynthesisOutcome(MODE_STRONG, SUCCESS, Q(1, 2), Q(1, 2), graph, outcome.tenders)


def test_las_reach_tight_fork_removes_exactly_c():
    graph, blue, red = fork_tight()
    subgraph = las_reach(graph, blue, red)
    assert set(subgraph.vertices) == set(graph.vertices) - {"c"}
    assert subgraph.successors("b") == ("d",)


def test_las_reach_wide_fork_removes_nothing():
    graph, blue, red = fork_wide()
    subgraph = las_reach(graph, blue, red)
    assert set(subgraph.vertices) == set(graph.vertices)


def test_las_reach_refuses_hopeless_start():
    graph = make_graph(["a", "b", "t1", "t2"], "a", [("a", "b")])
    with pytest.raises(PrunedStartError):
        las_reach(graph, {"t1"}, {"t2"})


def test_las_reach_requires_sink_targets():
    graph, _, red = fork_tight()
    with pytest.raises(InputError):
        las_reach(graph, {"b"}, red)


def test_aa_tight_fork_succeeds_with_quarter_budgets():
    graph, blue, red = fork_tight()
    outcome = synth_assume_admissible_reach(graph, blue, red)
    assert outcome.status == SUCCESS
    assert outcome.mode == MODE_AA
    assert outcome.threshold_1 == Q(1, 4)
    assert outcome.threshold_2 == Q(1, 4)
    assert outcome.flags == ()
    assert "c" not in outcome.kept_vertices


def test_aa_wide_fork_matches_strong():
    graph, blue, red = fork_wide()
    aa = synth_assume_admissible_reach(graph, blue, red)
    strong = synth_strong(graph, Objective.reach(blue), Objective.reach(red))
    assert aa.status == SUCCESS
    assert (aa.threshold_1, aa.threshold_2) == (strong.threshold_1, strong.threshold_2)
    assert aa.tenders[0].action == strong.tenders[0].action
    assert aa.tenders[1].base_bid == strong.tenders[1].base_bid


def test_aa_bridge_fails_and_is_flagged_non_binary():
    graph, blue, red = fork_bridge()
    outcome = synth_assume_admissible_reach(graph, blue, red)
    assert outcome.status == FAIL
    assert outcome.threshold_1 == Q(1, 2)
    assert outcome.threshold_2 == Q(1, 2)
    assert NON_BINARY_FLAG in outcome.flags
    assert set(outcome.kept_vertices) == set(graph.vertices)


def test_las_sum_is_one_exactly_off_the_shared_path():
    graph, blue, red = fork_tight()
    subgraph = las_reach(graph, blue, red)
    map_1 = solve_reach(subgraph, blue & set(subgraph.vertices))
    map_2 = solve_reach(subgraph, red & set(subgraph.vertices))
    sums = {v: map_1.value(v) + map_2.value(v) for v in subgraph.vertices}
    assert all(total <= 1 for total in sums.values())
    for v in ("a", "b", "d"):
        assert sums[v] < 1
    for v in ("e", "f", "g"):
        assert sums[v] == 1


def test_pruning_never_raises_thresholds():
    for seed in range(30):
        graph, targets_1, targets_2 = random_overlap_instance(seed)
        subgraph = las_reach(graph, targets_1, targets_2)
        kept = set(subgraph.vertices)
        for targets in (targets_1, targets_2):
            full = solve_reach(graph, targets)
            pruned = solve_reach(subgraph, targets & kept)
            for v in kept:
                assert pruned.value(v) <= full.value(v), (seed, v)


def test_synthesized_actions_avoid_dominated_successors():
    for seed in range(30):
        graph, targets_1, targets_2 = random_overlap_instance(seed)
        outcome = synth_assume_admissible_reach(graph, targets_1, targets_2)
        assert outcome.status == SUCCESS, seed
        for tender in outcome.tenders:
            th_map = tender.th_map
            for v, succ in tender.action.items():
                best = min(th_map.value(w) for w in outcome.graph.successors(v))
                if best < 1:
                    assert th_map.value(succ) < 1, (seed, v)


def test_las_buchi_rival_loops_keeps_everything():
    graph, accepting_1, accepting_2 = rival_loops()
    subgraph = las_buchi(graph, accepting_1, accepting_2)
    assert set(subgraph.vertices) == set(graph.vertices)


def test_las_buchi_strips_dead_bottom_component():
    graph = make_graph(["s", "u"], "s", [("s", "s"), ("s", "u"), ("u", "u")])
    subgraph = las_buchi(graph, {"s"}, {"s"})
    assert set(subgraph.vertices) == {"s"}


def test_las_buchi_refuses_doomed_start():
    graph = make_graph(["s"], "s", [("s", "s")])
    with pytest.raises(PrunedStartError):
        las_buchi(graph, set(), set())


def test_reachability_core_rival_loops():
    graph, accepting_1, accepting_2 = rival_loops()
    core_1, core_2 = reachability_core(graph, accepting_1, accepting_2)
    assert core_1 == {"a"}
    assert core_2 == {"d"}


def test_aa_buchi_rival_loops_fails_on_disjoint_cores():
    graph, accepting_1, accepting_2 = rival_loops()
    outcome = synth_assume_admissible_buchi(graph, accepting_1, accepting_2)
    assert outcome.status == FAIL
    assert outcome.reason == "reachability cores are disjoint"
    assert outcome.threshold_1 == Q(1, 3)
    assert outcome.threshold_2 == Q(2, 3)
    assert outcome.flags == ()


def test_aa_buchi_shared_component_is_free():
    graph, accepting_1, accepting_2 = accepting_ring()
    outcome = synth_assume_admissible_buchi(graph, accepting_1, accepting_2)
    assert outcome.status == SUCCESS
    assert outcome.threshold_1 == 0
    assert outcome.threshold_2 == 0


def test_contract_subgraph_excludes_both_forbidden_sets():
    graph, _, _ = fork_bridge()
    subgraph = contract_subgraph(graph, bridge_contract())
    assert set(subgraph.vertices) == {"a", "b", "d", "e", "g"}


def test_contract_subgraph_empty_contract_is_identity():
    graph, _, _ = fork_wide()
    subgraph = contract_subgraph(graph, Contract())
    assert set(subgraph.vertices) == set(graph.vertices)
    assert subgraph.edges == graph.edges


def test_contract_subgraph_refuses_forbidden_start():
    graph, _, _ = fork_wide()
    with pytest.raises(PrunedStartError):
        contract_subgraph(graph, Contract.avoid({"a"}, set()))


def test_ag_bridge_succeeds_under_the_contract():
    graph, blue, red = fork_bridge()
    outcome = synth_assume_guarantee(
        graph, Objective.reach(blue), Objective.reach(red), bridge_contract()
    )
    assert outcome.status == SUCCESS
    assert outcome.mode == MODE_AG
    assert outcome.threshold_1 == 0
    assert outcome.threshold_2 == Q(1, 2)
    assert set(outcome.kept_vertices) == {"a", "b", "d", "e", "g"}


def test_ag_refuses_contract_that_prunes_every_target():
    graph, blue, red = fork_bridge()
    with pytest.raises(InputError):
        synth_assume_guarantee(
            graph, Objective.reach(blue), Objective.reach(red), Contract.avoid(set(), {"d", "f"})
        )


def test_ag_empty_contract_reduces_to_strong():
    graph, blue, red = fork_wide()
    ag = synth_assume_guarantee(graph, Objective.reach(blue), Objective.reach(red), Contract())
    strong = synth_strong(graph, Objective.reach(blue), Objective.reach(red))
    assert ag.mode == MODE_AG
    assert ag.status == strong.status
    assert (ag.threshold_1, ag.threshold_2) == (strong.threshold_1, strong.threshold_2)


def test_contract_json_round_trip():
    contract = bridge_contract()
    assert contract_from_json(contract_to_json(contract)) == contract
    assert contract_to_json(contract) == {"forbidden_1": ["c"], "forbidden_2": ["f"]}


def test_contract_json_malformed():
    with pytest.raises(InputError):
        contract_from_json([])


def test_overlap_reach_fork():
    graph, blue, red = fork_wide()
    assert objectives_overlap(graph, Objective.reach(blue), Objective.reach(red))
    assert not objectives_overlap(graph, Objective.reach({"c"}), Objective.reach({"f"}))


def test_overlap_reach_sequential_non_sink_targets():
    graph, _, _ = fork_wide()
    assert objectives_overlap(graph, Objective.reach({"b"}), Objective.reach({"d"}))


def test_overlap_buchi():
    graph, accepting_1, accepting_2 = rival_loops()
    assert objectives_overlap(graph, Objective.buchi(accepting_1), Objective.buchi(accepting_2))
    assert not objectives_overlap(graph, Objective.buchi({"a"}), Objective.buchi({"d"}))


def test_overlap_rejects_mixed_kinds():
    graph, blue, _ = fork_wide()
    with pytest.raises(InputError):
        objectives_overlap(graph, Objective.reach(blue), Objective.buchi({"a"}))


def test_synthesize_dispatches_strong():
    graph, blue, red = fork_wide()
    outcome = synthesize(graph, Objective.reach(blue), Objective.reach(red))
    assert outcome.mode == MODE_STRONG
    assert outcome.status == SUCCESS


def test_synthesize_dispatches_aa_through_sinkify():
    graph, _, _ = fork_wide()
    outcome = synthesize(graph, Objective.reach({"b"}), Objective.reach({"d"}), MODE_AA)
    assert outcome.mode == MODE_AA
    assert outcome.status == SUCCESS
    assert (outcome.threshold_1, outcome.threshold_2) == (Q(0), Q(1, 2))
    assert all("@" in v for v in outcome.kept_vertices)


def test_synthesize_dispatches_aa_buchi():
    graph, accepting_1, accepting_2 = rival_loops()
    outcome = synthesize(
        graph, Objective.buchi(accepting_1), Objective.buchi(accepting_2), MODE_AA
    )
    assert outcome.mode == MODE_AA
    assert outcome.status == FAIL


def test_synthesize_dispatches_ag():
    graph, blue, red = fork_bridge()
    outcome = synthesize(
        graph, Objective.reach(blue), Objective.reach(red), MODE_AG, contract=bridge_contract()
    )
    assert outcome.status == SUCCESS
    assert outcome.threshold_2 == Q(1, 2)


def test_synthesize_rejects_bad_inputs():
    graph, blue, red = fork_wide()
    with pytest.raises(InputError):
        synthesize(graph, Objective.reach(blue), Objective.buchi({"a"}), MODE_AA)
    with pytest.raises(InputError):
        synthesize(graph, Objective.reach(blue), Objective.reach(red), MODE_AG)
    with pytest.raises(InputError):
        synthesize(graph, Objective.reach(blue), Objective.reach(red), "weak")
    with pytest.raises(InputError):
        synthesize(graph, Objective.reach({"zzz"}), Objective.reach(red))
