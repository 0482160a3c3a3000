"""Shared hand-worked fixtures and seeded corpus generators.

The fork family is a seven-vertex binary DAG whose exact thresholds are
easy to verify by hand; the loop fixture is the smallest graph where the
two recurrence objectives pull toward opposite self-loops. Corpus
generators are deterministic in their seed.
"""

from __future__ import annotations

import random

from bidsched import Contract, Graph, GridSpec, make_graph, reachable_to


def fork_graph() -> Graph:
    """a branches to two binary forks: b over {c, d} and e over {f, g}."""
    return make_graph(
        ["a", "b", "c", "d", "e", "f", "g"],
        "a",
        [("a", "b"), ("a", "e"), ("b", "c"), ("b", "d"), ("e", "f"), ("e", "g")],
    )


def fork_wide() -> tuple[Graph, frozenset[str], frozenset[str]]:
    """Fork with targets wide enough that strong synthesis succeeds."""
    return fork_graph(), frozenset({"c", "d", "g"}), frozenset({"d", "f"})


def fork_tight() -> tuple[Graph, frozenset[str], frozenset[str]]:
    """Fork where both sides need the shared leaf d or their private leaf."""
    return fork_graph(), frozenset({"d", "g"}), frozenset({"d", "f"})


def fork_bridge() -> tuple[Graph, frozenset[str], frozenset[str]]:
    """Wide fork plus a bridge edge b -> f, making b ternary.

    Every sink is a target of some side, so admissible pruning removes
    nothing and the threshold sum at a stays exactly 1; only a contract
    that fences off c and f unlocks a compatible pair.
    """
    graph = make_graph(
        ["a", "b", "c", "d", "e", "f", "g"],
        "a",
        [
            ("a", "b"),
            ("a", "e"),
            ("b", "c"),
            ("b", "d"),
            ("b", "f"),
            ("e", "f"),
            ("e", "g"),
        ],
    )
    return graph, frozenset({"c", "d", "g"}), frozenset({"d", "f"})


def bridge_contract() -> Contract:
    """Each side promises to stay away from the other's trap leaf."""
    return Contract.avoid({"c"}, {"f"})


def rival_loops() -> tuple[Graph, frozenset[str], frozenset[str]]:
    """Two self-loop lanes a and d bridged by the two-cycle b <-> c.

    Returns (graph, accepting_1, accepting_2) with initial vertex b; the
    first recurrence set prefers lane a, the second lane d.
    """
    graph = make_graph(
        ["a", "b", "c", "d"],
        "b",
        [("a", "a"), ("b", "a"), ("b", "c"), ("c", "b"), ("c", "d"), ("d", "d")],
    )
    return graph, frozenset({"a", "c"}), frozenset({"b", "d"})


def accepting_ring() -> tuple[Graph, frozenset[str], frozenset[str]]:
    """A three-cycle where each objective accepts a different vertex."""
    graph = make_graph(["u", "v", "w"], "u", [("u", "v"), ("v", "w"), ("w", "u")])
    return graph, frozenset({"u"}), frozenset({"v"})


def corridor(cols: int) -> GridSpec:
    """1 x cols corridor with both targets on the final cell."""
    end = f"{chr(ord('A') + cols - 1)}1"
    return GridSpec(1, cols, "A1", frozenset({end}), frozenset({end}))


def random_overlap_instance(
    seed: int, max_vertices: int = 30
) -> tuple[Graph, frozenset[str], frozenset[str]]:
    """Seeded binary graph with overlapping sink targets the start can reach.

    Out-degrees stay at most 2; both target sets are sinks and share at
    least one vertex, and the start always reaches a shared target, so
    assume-admissible synthesis has everything its guarantee needs.
    """
    rng = random.Random(seed)
    n = rng.randint(4, max_vertices)
    names = [f"v{i}" for i in range(n)]
    sink_count = rng.randint(2, max(2, n // 4))
    sinks = names[-sink_count:]
    adjacency: dict[str, list[str]] = {}
    for vertex in names[:-sink_count]:
        degree = rng.choice((1, 2, 2))
        adjacency[vertex] = rng.sample(names, degree)
    shared = rng.choice(sinks)
    targets_1 = frozenset({shared, rng.choice(sinks)})
    targets_2 = frozenset({shared, rng.choice(sinks)})

    def build() -> Graph:
        edges = [(v, w) for v, ws in adjacency.items() for w in ws]
        return make_graph(names, names[0], edges)

    graph = build()
    if names[0] not in reachable_to(graph, {shared}):
        adjacency[names[0]][0] = shared
        graph = build()
    return graph, targets_1, targets_2


def random_small_instance(seed: int) -> tuple[Graph, frozenset[str]]:
    """Seeded graph of at most 10 vertices with sink targets.

    Out-degrees run up to 3 (kept rare) so both the strategy-iteration
    path and the exhaustive oracle stay exercised but cheap.
    """
    rng = random.Random(seed)
    n = rng.randint(3, 10)
    names = [f"v{i}" for i in range(n)]
    sink_count = rng.randint(1, max(1, n // 3))
    sinks = names[-sink_count:]
    adjacency: dict[str, list[str]] = {}
    for vertex in names[:-sink_count]:
        degree = rng.choices((1, 2, 3), weights=(3, 5, 2))[0]
        adjacency[vertex] = rng.sample(names, min(degree, n))
    targets = frozenset(rng.sample(sinks, rng.randint(1, sink_count)))
    edges = [(v, w) for v, ws in adjacency.items() for w in ws]
    return make_graph(names, names[0], edges), targets


def random_dag_instance(seed: int) -> tuple[Graph, frozenset[str]]:
    """Seeded DAG with sink targets, for back-substitution cross-checks."""
    rng = random.Random(seed)
    n = rng.randint(3, 12)
    names = [f"v{i}" for i in range(n)]
    adjacency: dict[str, list[str]] = {}
    for i, vertex in enumerate(names[:-1]):
        later = names[i + 1 :]
        degree = min(len(later), rng.choice((1, 2, 2, 3)))
        adjacency[vertex] = rng.sample(later, degree)
    graph = make_graph(names, names[0], [(v, w) for v, ws in adjacency.items() for w in ws])
    sinks = [v for v in names if graph.is_sink(v)]
    targets = frozenset(rng.sample(sinks, rng.randint(1, len(sinks))))
    return graph, targets
