"""One-way grid worlds for path-planning instances.

Cells use spreadsheet names: column letter(s) then 1-based row, so "B8" is
column 2, row 8. Moves go between orthogonal neighbors from lower to strictly
higher rank, which makes every grid graph acyclic by construction. The default
rank is the row-major offset from the start cell; a custom gradient can be
supplied to shape the one-way direction.
"""

from __future__ import annotations

import logging
import random
import string
from dataclasses import dataclass, field

from .errors import InputError
from .graphs import Graph, Objective, make_graph, reachable_from

logger = logging.getLogger(__name__)


def cell_name(row: int, col: int) -> str:
    """Spreadsheet-style name for a 1-based (row, col) pair."""
    if row < 1 or col < 1:
        raise InputError(f"cell indices are 1-based, got ({row}, {col})")
    letters = ""
    c = col
    while c > 0:
        c, rem = divmod(c - 1, 26)
        letters = string.ascii_uppercase[rem] + letters
    return f"{letters}{row}"


def parse_cell(name: str) -> tuple[int, int]:
    """Inverse of cell_name; returns (row, col)."""
    letters = name.rstrip("0123456789")
    digits = name[len(letters):]
    if not letters or not digits or not letters.isalpha():
        raise InputError(f"malformed cell name {name!r}")
    col = 0
    for ch in letters.upper():
        col = col * 26 + (ord(ch) - ord("A") + 1)
    return int(digits), col


@dataclass(frozen=True)
class GridSpec:
    """A rows×cols one-way grid with obstacles and two target sets."""

    rows: int
    cols: int
    start: str
    targets_1: frozenset[str]
    targets_2: frozenset[str]
    obstacles: frozenset[str] = frozenset()
    rank: dict[str, int] | None = field(default=None)

    def all_cells(self) -> list[str]:
        return [cell_name(r, c) for r in range(1, self.rows + 1) for c in range(1, self.cols + 1)]

    def rank_of(self, cell: str) -> int:
        if self.rank is not None:
            try:
                return self.rank[cell]
            except KeyError as exc:
                raise InputError(f"rank gradient missing cell {cell!r}") from exc
        row, col = parse_cell(cell)
        start_row, start_col = parse_cell(self.start)
        return ((row - 1) * self.cols + (col - 1)) - ((start_row - 1) * self.cols + (start_col - 1))


def validate_grid(spec: GridSpec) -> None:
    if spec.rows < 1 or spec.cols < 1:
        raise InputError("grid dimensions must be positive")
    cells = set(spec.all_cells())
    for label, group in (("start", {spec.start}), ("targets_1", spec.targets_1), ("targets_2", spec.targets_2), ("obstacles", spec.obstacles)):
        stray = group - cells
        if stray:
            raise InputError(f"{label} outside the grid: {sorted(stray)}")
    if spec.start in spec.obstacles:
        raise InputError(f"start cell {spec.start!r} is blocked")
    blocked_targets = (spec.targets_1 | spec.targets_2) & spec.obstacles
    if blocked_targets:
        raise InputError(f"target cells are blocked: {sorted(blocked_targets)}")


def grid_to_graph(spec: GridSpec) -> tuple[Graph, Objective, Objective]:
    """Expand a GridSpec into a graph and its two Reach objectives.

    Edges run to orthogonal neighbors of strictly higher rank only. Non-target
    cells without a legal move become sinks; they are kept (losing the token
    there is meaningful) and reported through the module logger.
    """
    validate_grid(spec)
    open_cells = [c for c in spec.all_cells() if c not in spec.obstacles]
    edges: list[tuple[str, str]] = []
    for cell in open_cells:
        row, col = parse_cell(cell)
        here = spec.rank_of(cell)
        for nr, nc in ((row, col + 1), (row + 1, col), (row, col - 1), (row - 1, col)):
            if not (1 <= nr <= spec.rows and 1 <= nc <= spec.cols):
                continue
            neighbor = cell_name(nr, nc)
            if neighbor in spec.obstacles:
                continue
            if spec.rank_of(neighbor) > here:
                edges.append((cell, neighbor))
    graph = make_graph(open_cells, spec.start, edges)
    targets = spec.targets_1 | spec.targets_2
    dead = [c for c in open_cells if graph.is_sink(c) and c not in targets]
    if dead:
        logger.warning("grid has %d dead non-target cell(s): %s", len(dead), ", ".join(dead))
    return graph, Objective.reach(spec.targets_1), Objective.reach(spec.targets_2)


def generate_grid(rows: int, cols: int, obstacle_density: float = 0.2, seed: int = 0) -> GridSpec:
    """Deterministically sample a solvable grid instance.

    Obstacles are sampled cell-wise at the given density (the start stays
    open). Both objectives get one shared far target plus one private target
    each, all drawn from cells reachable from the start, biased toward high
    rank so the instance is not trivial. The same arguments always produce
    the same instance.
    """
    if not 0.0 <= obstacle_density < 1.0:
        raise InputError("obstacle density must lie in [0, 1)")
    rng = random.Random(seed)
    start = cell_name(1, 1)
    base = GridSpec(rows, cols, start, frozenset(), frozenset())
    cells = base.all_cells()
    obstacles = frozenset(c for c in cells if c != start and rng.random() < obstacle_density)

    def reachable_with(obs: frozenset[str]) -> list[str]:
        open_cells = frozenset(c for c in cells if c not in obs)
        probe = GridSpec(rows, cols, start, open_cells, frozenset(), obs)
        graph, _, _ = grid_to_graph(probe)
        reached = reachable_from(graph) - {start}
        return sorted(reached, key=lambda c: (probe.rank_of(c), c))

    reachable = reachable_with(obstacles)
    if not reachable:
        obstacles = frozenset()
        reachable = reachable_with(obstacles)
    if not reachable:
        raise InputError("grid too small to place targets")

    far = reachable[max(0, len(reachable) // 2):]
    shared = rng.choice(far)
    private_1 = rng.choice(far)
    private_2 = rng.choice(far)
    return GridSpec(
        rows=rows,
        cols=cols,
        start=start,
        targets_1=frozenset({shared, private_1}),
        targets_2=frozenset({shared, private_2}),
        obstacles=obstacles,
    )


def grid_spec_to_json(spec: GridSpec) -> dict:
    data = {
        "rows": spec.rows,
        "cols": spec.cols,
        "start": spec.start,
        "targets_1": sorted(spec.targets_1),
        "targets_2": sorted(spec.targets_2),
        "obstacles": sorted(spec.obstacles),
    }
    if spec.rank is not None:
        data["rank"] = dict(sorted(spec.rank.items()))
    return data


def grid_spec_from_json(data: dict) -> GridSpec:
    try:
        rank = data.get("rank")
        spec = GridSpec(
            rows=int(data["rows"]),
            cols=int(data["cols"]),
            start=str(data["start"]),
            targets_1=frozenset(str(c) for c in data["targets_1"]),
            targets_2=frozenset(str(c) for c in data["targets_2"]),
            obstacles=frozenset(str(c) for c in data.get("obstacles", [])),
            rank={str(c): int(r) for c, r in rank.items()} if rank is not None else None,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed grid spec JSON: {exc}") from exc
    validate_grid(spec)
    return spec
