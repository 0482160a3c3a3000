"""Graph core: construction, validation, components, sinkify, DOT."""

from __future__ import annotations

import random

import pytest

from bidsched import (
    Graph,
    InputError,
    Objective,
    base_vertex,
    graph_from_json,
    graph_to_json,
    is_acyclic,
    is_binary,
    make_graph,
    objective_from_json,
    objective_to_json,
    reachable_from,
    reachable_to,
    scc_decompose,
    sinkify,
    to_dot,
    validate,
)
from bidsched.graphs import is_base_copy

from fixtures import fork_bridge, fork_wide, rival_loops
from oracles import conjunction_reachable, mutual_components


def random_graph(seed: int, max_vertices: int = 9) -> Graph:
    rng = random.Random(seed)
    n = rng.randint(2, max_vertices)
    names = [f"n{i}" for i in range(n)]
    edges = []
    for v in names:
        for w in rng.sample(names, rng.randint(0, min(3, n))):
            edges.append((v, w))
    return make_graph(names, names[0], edges)


def test_make_graph_dedupes_successors():
    graph = make_graph(["a", "b"], "a", [("a", "b"), ("a", "b")])
    assert graph.successors("a") == ("b",)


def test_validate_catches_problems():
    bad = Graph(vertices=("a",), initial="z", edges={"a": ("q",)})
    problems = validate(bad)
    assert any("initial" in p for p in problems)
    assert any("q" in p for p in problems)
    assert validate(fork_wide()[0]) == []


def test_require_valid_rejects_duplicates_and_strays():
    from bidsched.graphs import require_valid

    with pytest.raises(InputError):
        require_valid(make_graph(["a", "a"], "a", []))
    with pytest.raises(InputError):
        require_valid(make_graph(["a"], "a", [("a", "missing")]))


def test_sinks_and_contains():
    graph, _, _ = fork_wide()
    assert graph.is_sink("c") and not graph.is_sink("a")
    assert set(graph.sinks) == {"c", "d", "f", "g"}
    assert "a" in graph and "z" not in graph


def test_induced_subgraph():
    graph, _, _ = fork_wide()
    sub = graph.induced_subgraph({"a", "b", "c", "d"})
    assert set(sub.vertices) == {"a", "b", "c", "d"}
    assert sub.successors("a") == ("b",)
    assert sub.initial == "a"


def test_scc_decompose_matches_pairwise_oracle():
    for seed in range(40):
        graph = random_graph(seed)
        decomposition = scc_decompose(graph)
        assert set(map(frozenset, decomposition.components)) == mutual_components(graph)


def test_scc_bottom_components():
    graph, _, _ = rival_loops()
    decomposition = scc_decompose(graph)
    comps = set(map(frozenset, decomposition.components))
    assert comps == {frozenset({"a"}), frozenset({"b", "c"}), frozenset({"d"})}
    bottoms = {frozenset(c) for c in decomposition.bottom_components()}
    assert bottoms == {frozenset({"a"}), frozenset({"d"})}


def test_reachability_helpers():
    graph, _, _ = fork_wide()
    assert reachable_to(graph, {"d"}) == {"a", "b", "d"}
    assert reachable_from(graph) == set(graph.vertices)
    island = make_graph(["a", "b", "x"], "a", [("a", "b")])
    assert reachable_from(island) == {"a", "b"}


def test_binary_and_acyclic_predicates():
    wide, _, _ = fork_wide()
    bridge, _, _ = fork_bridge()
    loops, _, _ = rival_loops()
    assert is_binary(wide) and not is_binary(bridge)
    assert is_acyclic(wide) and not is_acyclic(loops)


def test_objective_kinds_and_validation():
    with pytest.raises(InputError):
        Objective("nonsense")
    with pytest.raises(InputError):
        Objective.parity({"a": 1}).check_against(fork_wide()[0])
    objective = Objective.reach({"zz"})
    with pytest.raises(InputError):
        objective.check_against(fork_wide()[0])


def test_objective_colors():
    accepting = Objective.buchi({"a"})
    assert accepting.color_of("a") == 2
    assert accepting.color_of("b") == 1
    colored = Objective.parity({"a": 3, "b": 0})
    assert colored.color_of("a") == 3


def test_sinkify_keeps_three_copies_and_routes_initial():
    graph = make_graph(["a", "t", "b"], "a", [("a", "t"), ("t", "b")])
    product = sinkify(graph, Objective.reach({"t"}), Objective.reach({"b"}))
    assert len(product.graph.vertices) == 3 * len(graph.vertices)
    assert product.graph.initial == "a@⊥"
    assert "a@1" in product.graph.vertices
    assert product.back_map["t@1"] == "t"


def test_sinkify_conjunction_equivalence():
    rng = random.Random(3)
    for seed in range(40):
        graph = random_graph(seed, max_vertices=7)
        pool = list(graph.vertices)
        t1 = frozenset(rng.sample(pool, rng.randint(1, len(pool))))
        t2 = frozenset(rng.sample(pool, rng.randint(1, len(pool))))
        product = sinkify(graph, Objective.reach(t1), Objective.reach(t2))
        joint = product.reach_1.vertex_set & product.reach_2.vertex_set
        got = bool(reachable_from(product.graph) & joint)
        assert got == conjunction_reachable(graph, t1, t2), seed


def test_sinkify_rejects_non_reach():
    graph, accepting_1, accepting_2 = rival_loops()
    with pytest.raises(InputError):
        sinkify(graph, Objective.buchi(accepting_1), Objective.buchi(accepting_2))


def test_base_vertex_projection():
    assert base_vertex("a@⊥") == "a"
    assert base_vertex("a@1") == "a"
    assert base_vertex("a@2") == "a"
    assert base_vertex("plain") == "plain"
    assert is_base_copy("a@⊥") and is_base_copy("plain")
    assert not is_base_copy("a@1") and not is_base_copy("a@2")


def test_graph_json_round_trip():
    graph, _, _ = fork_bridge()
    assert graph_from_json(graph_to_json(graph)) == graph


def test_graph_json_rejects_garbage():
    with pytest.raises(InputError):
        graph_from_json({"vertices": ["a"], "edges": [["a"]]})


def test_objective_json_round_trip():
    for objective in (
        Objective.reach({"a", "b"}),
        Objective.safety({"a"}),
        Objective.buchi({"b"}),
        Objective.parity({"a": 2, "b": 1}),
    ):
        assert objective_from_json(objective_to_json(objective)) == objective


def test_to_dot_coloring():
    graph, blue, red = fork_wide()
    dot = to_dot(graph, Objective.reach(blue), Objective.reach(red), {"a": "b"}, {"a": "e"})
    assert '"d" [fillcolor="plum"]' in dot
    assert '"c" [fillcolor="lightblue"]' in dot
    assert '"f" [fillcolor="lightcoral"]' in dot
    assert "peripheries=2" in dot
    assert '"a" -> "b" [color="blue", penwidth=2.5];' in dot
    assert '"a" -> "e" [color="red", penwidth=2.5];' in dot


def test_graph_hash_excludes_edges_but_eq_compares_them():
    g1 = make_graph(["a", "b"], "a", [("a", "b")])
    g2 = make_graph(["a", "b"], "a", [])
    assert hash(g1) == hash(g2)
    assert g1 != g2
