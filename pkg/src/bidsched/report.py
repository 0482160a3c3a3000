"""Figure rendering for simulation reports.

Renders PNGs next to the primary CSV/JSONL outputs: a budget/bid series
for any composition trace, and a cell map with the traveled path for grid
instances. Headless-safe via the Agg backend.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Rectangle

from .grids import GridSpec, parse_cell
from .runtime import TraceRecord

_WINNER_COLORS = {1: "tab:blue", 2: "tab:red"}


def render_budget_figure(trace: list[TraceRecord], path, title: str = "Budget series") -> None:
    """Step-by-step budget of tender 1 with both bid series underneath."""
    steps = [r.step for r in trace]
    budgets = [float(r.config_after.budget_1) for r in trace]
    fig, (ax_budget, ax_bids) = plt.subplots(2, 1, sharex=True, figsize=(7, 5))
    if trace:
        start = [trace[0].step - 1] if trace else []
        ax_budget.step(
            start + steps,
            [float(trace[0].config_before.budget_1)] + budgets,
            where="post",
            color="tab:blue",
            label="budget 1",
        )
        ax_budget.step(
            start + steps,
            [float(trace[0].config_before.budget_2)] + [1.0 - b for b in budgets],
            where="post",
            color="tab:red",
            label="budget 2",
        )
        ax_bids.bar(
            [s - 0.15 for s in steps],
            [float(r.bid_1) for r in trace],
            width=0.3,
            color="tab:blue",
            label="bid 1",
        )
        ax_bids.bar(
            [s + 0.15 for s in steps],
            [float(r.bid_2) for r in trace],
            width=0.3,
            color="tab:red",
            label="bid 2",
        )
    ax_budget.set_ylabel("budget")
    ax_budget.set_ylim(-0.05, 1.05)
    ax_budget.legend(loc="best", fontsize=8)
    ax_budget.set_title(title)
    ax_bids.set_ylabel("bid")
    ax_bids.set_xlabel("step")
    ax_bids.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_grid_figure(
    spec: GridSpec,
    trace: list[TraceRecord],
    path,
    title: str = "Grid run",
) -> None:
    """Cell map: rank shading, obstacles, targets, and the traveled path.

    Visited cells are outlined in the color of the tender that won the
    auction leaving them (blue for 1, red for 2).
    """
    fig, ax = plt.subplots(figsize=(max(3, spec.cols * 0.7), max(3, spec.rows * 0.7)))
    ranks = [spec.rank_of(c) for c in spec.all_cells() if c not in spec.obstacles]
    lo, hi = (min(ranks), max(ranks)) if ranks else (0, 1)
    span = max(1, hi - lo)
    for cell in spec.all_cells():
        row, col = parse_cell(cell)
        x, y = col - 1, spec.rows - row
        if cell in spec.obstacles:
            face = "0.25"
        elif cell in spec.targets_1 and cell in spec.targets_2:
            face = "plum"
        elif cell in spec.targets_1:
            face = "lightblue"
        elif cell in spec.targets_2:
            face = "lightcoral"
        else:
            shade = 0.92 - 0.45 * (spec.rank_of(cell) - lo) / span
            face = (shade - 0.25, shade, shade - 0.25)
        ax.add_patch(Rectangle((x, y), 1, 1, facecolor=face, edgecolor="white"))
        ax.text(x + 0.5, y + 0.5, cell, ha="center", va="center", fontsize=7)

    for record in trace:
        row, col = parse_cell(record.config_before.vertex)
        x, y = col - 1, spec.rows - row
        ax.add_patch(
            Rectangle(
                (x + 0.07, y + 0.07),
                0.86,
                0.86,
                fill=False,
                edgecolor=_WINNER_COLORS[record.winner],
                linewidth=2.0,
            )
        )
        nrow, ncol = parse_cell(record.next_vertex)
        ax.annotate(
            "",
            xy=(ncol - 0.5, spec.rows - nrow + 0.5),
            xytext=(col - 0.5, spec.rows - row + 0.5),
            arrowprops={"arrowstyle": "->", "color": "0.1", "lw": 1.4},
        )

    srow, scol = parse_cell(spec.start)
    ax.add_patch(
        Rectangle(
            (scol - 1, spec.rows - srow),
            1,
            1,
            fill=False,
            edgecolor="black",
            linewidth=2.4,
        )
    )
    ax.set_xlim(0, spec.cols)
    ax.set_ylim(0, spec.rows)
    ax.set_aspect("equal")
    ax.set_xticks([])
    ax.set_yticks([])
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
