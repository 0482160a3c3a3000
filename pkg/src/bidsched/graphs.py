"""Finite directed graphs, objectives, and structural analyses.

Vertices are opaque strings. Successor lists are ordered and duplicate-free,
so every downstream tie-break is deterministic. Sinks (empty successor list)
are legal; reachability targets are usually modeled as sinks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import InputError

REACH = "reach"
SAFETY = "safety"
BUCHI = "buchi"
PARITY = "parity"

_KINDS = (REACH, SAFETY, BUCHI, PARITY)


@dataclass(frozen=True)
class Graph:
    """Directed graph ⟨V, v0, E⟩ with ordered adjacency.

    Treated as immutable throughout; the adjacency dict is excluded from
    the hash (equality still compares it), so instances can key caches.
    """

    vertices: tuple[str, ...]
    initial: str
    edges: dict[str, tuple[str, ...]] = field(default_factory=dict, hash=False)

    def successors(self, vertex: str) -> tuple[str, ...]:
        return self.edges.get(vertex, ())

    def is_sink(self, vertex: str) -> bool:
        return not self.edges.get(vertex)

    @property
    def sinks(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if self.is_sink(v))

    def __contains__(self, vertex: str) -> bool:
        return vertex in self.edges or vertex in self.vertices

    def induced_subgraph(self, keep: set[str], initial: str | None = None) -> Graph:
        """Induced subgraph on `keep`, preserving vertex and successor order."""
        start = initial if initial is not None else self.initial
        if start not in keep:
            raise InputError(f"initial vertex {start!r} not in the induced subgraph")
        vertices = tuple(v for v in self.vertices if v in keep)
        edges = {
            v: tuple(w for w in self.successors(v) if w in keep)
            for v in vertices
            if any(w in keep for w in self.successors(v))
        }
        return Graph(vertices=vertices, initial=start, edges=edges)


def make_graph(
    vertices: list[str] | tuple[str, ...],
    initial: str,
    edges: list[tuple[str, str]] | tuple[tuple[str, str], ...],
) -> Graph:
    """Build a Graph from an edge list, preserving input order everywhere."""
    adjacency: dict[str, list[str]] = {}
    for source, target in edges:
        adjacency.setdefault(source, [])
        if target not in adjacency[source]:
            adjacency[source].append(target)
    return Graph(
        vertices=tuple(vertices),
        initial=initial,
        edges={v: tuple(ws) for v, ws in adjacency.items()},
    )


def validate(graph: Graph) -> list[str]:
    """Return a list of violations; an empty list means the graph is well formed."""
    violations: list[str] = []
    known = set(graph.vertices)
    if len(known) != len(graph.vertices):
        violations.append("duplicate vertex identifiers")
    if graph.initial not in known:
        violations.append(f"missing initial vertex {graph.initial!r}")
    for source, targets in graph.edges.items():
        if source not in known:
            violations.append(f"dangling edge source {source!r}")
        seen: set[str] = set()
        for target in targets:
            if target not in known:
                violations.append(f"dangling edge {source!r}->{target!r}")
            if target in seen:
                violations.append(f"duplicate successor {target!r} of {source!r}")
            seen.add(target)
    return violations


def require_valid(graph: Graph) -> None:
    violations = validate(graph)
    if violations:
        raise InputError("invalid graph: " + "; ".join(violations))


@dataclass(frozen=True)
class Objective:
    """One of Reach(T), Safety(S), Büchi(B), or max-even Parity(coloring)."""

    kind: str
    vertex_set: frozenset[str] = frozenset()
    coloring: dict[str, int] | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise InputError(f"unknown objective kind {self.kind!r}")
        if self.kind == PARITY and self.coloring is None:
            raise InputError("parity objective requires a coloring")

    @staticmethod
    def reach(targets) -> Objective:
        return Objective(REACH, frozenset(targets))

    @staticmethod
    def safety(safe) -> Objective:
        return Objective(SAFETY, frozenset(safe))

    @staticmethod
    def buchi(accepting) -> Objective:
        return Objective(BUCHI, frozenset(accepting))

    @staticmethod
    def parity(coloring: dict[str, int]) -> Objective:
        return Objective(PARITY, frozenset(), dict(coloring))

    def check_against(self, graph: Graph) -> None:
        known = set(graph.vertices)
        if self.kind == PARITY:
            missing = known - set(self.coloring or {})
            if missing:
                raise InputError(f"parity coloring not total, missing {sorted(missing)}")
            return
        stray = self.vertex_set - known
        if stray:
            raise InputError(f"objective references unknown vertices {sorted(stray)}")

    def color_of(self, vertex: str) -> int:
        """Parity color; Büchi is encoded as accepting=2, everything else=1."""
        if self.kind == PARITY:
            return (self.coloring or {})[vertex]
        if self.kind == BUCHI:
            return 2 if vertex in self.vertex_set else 1
        raise InputError(f"{self.kind} objective has no coloring")

    def restricted(self, keep: set[str]) -> Objective:
        if self.kind == PARITY:
            return Objective.parity({v: c for v, c in (self.coloring or {}).items() if v in keep})
        return Objective(self.kind, self.vertex_set & keep)


@dataclass(frozen=True)
class SccDecomposition:
    """SCC partition plus bottom flags ("bottom" = no edge leaves the component)."""

    components: tuple[frozenset[str], ...]
    is_bottom: tuple[bool, ...]
    component_of: dict[str, int]

    def bottom_components(self) -> tuple[frozenset[str], ...]:
        return tuple(c for c, b in zip(self.components, self.is_bottom) if b)


def scc_decompose(graph: Graph) -> SccDecomposition:
    """Tarjan's algorithm, iterative to survive deep graphs."""
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    counter = 0
    components: list[frozenset[str]] = []

    for root in graph.vertices:
        if root in index:
            continue
        work: list[tuple[str, int]] = [(root, 0)]
        while work:
            vertex, child_idx = work.pop()
            if child_idx == 0:
                index[vertex] = lowlink[vertex] = counter
                counter += 1
                stack.append(vertex)
                on_stack.add(vertex)
            successors = graph.successors(vertex)
            advanced = False
            for i in range(child_idx, len(successors)):
                child = successors[i]
                if child not in index:
                    work.append((vertex, i + 1))
                    work.append((child, 0))
                    advanced = True
                    break
                if child in on_stack:
                    lowlink[vertex] = min(lowlink[vertex], index[child])
            if advanced:
                continue
            if lowlink[vertex] == index[vertex]:
                component = set()
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.add(member)
                    if member == vertex:
                        break
                components.append(frozenset(component))
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[vertex])

    component_of = {v: i for i, comp in enumerate(components) for v in comp}
    is_bottom = tuple(
        all(component_of[w] == i for v in comp for w in graph.successors(v))
        for i, comp in enumerate(components)
    )
    return SccDecomposition(tuple(components), is_bottom, component_of)


def is_binary(graph: Graph) -> bool:
    """True iff every vertex has at most two successors."""
    return all(len(graph.successors(v)) <= 2 for v in graph.vertices)


def reachable_to(graph: Graph, targets: set[str]) -> set[str]:
    """Vertices from which some path reaches `targets` (backward BFS)."""
    predecessors: dict[str, list[str]] = {v: [] for v in graph.vertices}
    for source, succs in graph.edges.items():
        for target in succs:
            predecessors[target].append(source)
    reached = {t for t in targets if t in predecessors}
    frontier = list(reached)
    while frontier:
        vertex = frontier.pop()
        for pred in predecessors[vertex]:
            if pred not in reached:
                reached.add(pred)
                frontier.append(pred)
    return reached


def reachable_from(graph: Graph, sources: set[str] | None = None) -> set[str]:
    """Vertices reachable from `sources` (default: the initial vertex)."""
    frontier = list(sources) if sources is not None else [graph.initial]
    reached = set(frontier)
    while frontier:
        vertex = frontier.pop()
        for succ in graph.successors(vertex):
            if succ not in reached:
                reached.add(succ)
                frontier.append(succ)
    return reached


def is_acyclic(graph: Graph) -> bool:
    """True iff the graph has no directed cycle (self-loops included)."""
    return all(len(c) == 1 for c in scc_decompose(graph).components) and all(
        v not in graph.successors(v) for v in graph.vertices
    )


@dataclass(frozen=True)
class SinkifyResult:
    graph: Graph
    reach_1: Objective
    reach_2: Objective
    back_map: dict[str, str]


_COPY_SUFFIX = {"bot": "@⊥", "one": "@1", "two": "@2"}


def sinkify(graph: Graph, reach_1: Objective, reach_2: Objective) -> SinkifyResult:
    """Reduce two (possibly non-sink) Reach objectives to sink-target form.

    The product holds three copies of the graph that memorize which objective
    has been fulfilled so far: none (⊥), the first (1), or the second (2).
    Visiting T1 in the ⊥ copy transfers control to copy 1 and symmetrically;
    in copy i every sink is a target of objective i, and visiting the other
    objective's target inside copy i ends the play at a fresh sink that counts
    for both. A path of the original graph satisfies Reach(T1) ∩ Reach(T2)
    iff its image satisfies both new sink-target objectives.
    """
    if reach_1.kind != REACH or reach_2.kind != REACH:
        raise InputError("sinkify requires two Reach objectives")
    require_valid(graph)
    reach_1.check_against(graph)
    reach_2.check_against(graph)
    t1, t2 = reach_1.vertex_set, reach_2.vertex_set

    def name(copy: str, vertex: str) -> str:
        return vertex + _COPY_SUFFIX[copy]

    def route(copy: str, vertex: str) -> tuple[str, str]:
        """Copy actually entered when the token moves onto `vertex`."""
        if copy == "bot":
            if vertex in t1 and vertex in t2:
                return ("bot", vertex)
            if vertex in t1:
                return ("one", vertex)
            if vertex in t2:
                return ("two", vertex)
            return ("bot", vertex)
        if copy == "one":
            return ("one", vertex)
        return ("two", vertex)

    def forced_sink(copy: str, vertex: str) -> bool:
        if copy == "bot":
            return vertex in t1 and vertex in t2
        if copy == "one":
            return vertex in t2
        return vertex in t1

    vertices: list[str] = []
    edges: dict[str, tuple[str, ...]] = {}
    back_map: dict[str, str] = {}
    targets_1: set[str] = set()
    targets_2: set[str] = set()

    for copy in ("bot", "one", "two"):
        for vertex in graph.vertices:
            product = name(copy, vertex)
            vertices.append(product)
            back_map[product] = vertex
            sink_here = forced_sink(copy, vertex) or graph.is_sink(vertex)
            if not sink_here:
                seen: list[str] = []
                for succ in graph.successors(vertex):
                    routed = name(*route(copy, succ))
                    if routed not in seen:
                        seen.append(routed)
                edges[product] = tuple(seen)
            if copy == "bot" and vertex in t1 and vertex in t2:
                targets_1.add(product)
                targets_2.add(product)
            if copy == "one":
                if sink_here:
                    targets_1.add(product)
                if vertex in t2:
                    targets_2.add(product)
            if copy == "two":
                if sink_here:
                    targets_2.add(product)
                if vertex in t1:
                    targets_1.add(product)

    initial = name(*route("bot", graph.initial))
    product_graph = Graph(vertices=tuple(vertices), initial=initial, edges=edges)
    return SinkifyResult(
        graph=product_graph,
        reach_1=Objective.reach(targets_1),
        reach_2=Objective.reach(targets_2),
        back_map=back_map,
    )


def base_vertex(name: str) -> str:
    """Original vertex behind a product copy name; identity for plain names."""
    for suffix in _COPY_SUFFIX.values():
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return name


def is_base_copy(name: str) -> bool:
    """True unless the name lives in one of the satisfied copies."""
    return not name.endswith((_COPY_SUFFIX["one"], _COPY_SUFFIX["two"]))


def graph_to_json(graph: Graph) -> dict:
    edge_list = [[v, w] for v in graph.vertices for w in graph.successors(v)]
    return {"vertices": list(graph.vertices), "initial": graph.initial, "edges": edge_list}


def graph_from_json(data: dict) -> Graph:
    try:
        graph = make_graph(
            [str(v) for v in data["vertices"]],
            str(data["initial"]),
            [(str(a), str(b)) for a, b in data["edges"]],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed graph JSON: {exc}") from exc
    require_valid(graph)
    return graph


def objective_to_json(objective: Objective) -> dict:
    if objective.kind == PARITY:
        return {"kind": PARITY, "coloring": dict(sorted((objective.coloring or {}).items()))}
    return {"kind": objective.kind, "set": sorted(objective.vertex_set)}


def objective_from_json(data: dict) -> Objective:
    try:
        kind = str(data["kind"]).lower()
        if kind == PARITY:
            return Objective.parity({str(v): int(c) for v, c in data["coloring"].items()})
        return Objective(kind, frozenset(str(v) for v in data["set"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed objective JSON: {exc}") from exc


def dump_json(payload: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=False)
        handle.write("\n")


def load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def to_dot(
    graph: Graph,
    objective_1: Objective | None = None,
    objective_2: Objective | None = None,
    chosen_edges_1: dict[str, str] | None = None,
    chosen_edges_2: dict[str, str] | None = None,
) -> str:
    """GraphViz export with the blue/red/purple target convention.

    Vertices in the first objective's set are blue, the second's red, shared
    ones purple; tender action tables can be overlaid as thick colored edges.
    """
    set_1 = objective_1.vertex_set if objective_1 is not None else frozenset()
    set_2 = objective_2.vertex_set if objective_2 is not None else frozenset()
    lines = ["digraph bidsched {", "  rankdir=LR;", '  node [shape=circle, style=filled, fillcolor=white];']
    for vertex in graph.vertices:
        attrs = []
        if vertex in set_1 and vertex in set_2:
            attrs.append('fillcolor="plum"')
        elif vertex in set_1:
            attrs.append('fillcolor="lightblue"')
        elif vertex in set_2:
            attrs.append('fillcolor="lightcoral"')
        if vertex == graph.initial:
            attrs.append("peripheries=2")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f'  "{vertex}"{suffix};')
    chosen_1 = chosen_edges_1 or {}
    chosen_2 = chosen_edges_2 or {}
    for vertex in graph.vertices:
        for succ in graph.successors(vertex):
            marks = []
            if chosen_1.get(vertex) == succ:
                marks.append("blue")
            if chosen_2.get(vertex) == succ:
                marks.append("red")
            if len(marks) == 2:
                lines.append(f'  "{vertex}" -> "{succ}" [color="purple", penwidth=2.5];')
            elif marks:
                lines.append(f'  "{vertex}" -> "{succ}" [color="{marks[0]}", penwidth=2.5];')
            else:
                lines.append(f'  "{vertex}" -> "{succ}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
