"""Auction-scheduled tender synthesis for two-objective graph games.

Two independent objectives each get a tender: a threshold budget, an action
table, and a bidding table. At runtime the tenders bid for every move and
the winner steers; whenever the threshold budgets at the start sum below 1,
both objectives are met no matter how the auctions interleave. Three
synthesis regimes (strong, assume-admissible, assume-guarantee) trade
assumptions for a larger set of solvable instances.
"""

from __future__ import annotations

from .errors import BidschedError, InputError, OracleError, PrunedStartError, SolverError
from .graphs import (
    BUCHI,
    PARITY,
    REACH,
    SAFETY,
    Graph,
    Objective,
    SinkifyResult,
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
from .grids import GridSpec, cell_name, generate_grid, grid_spec_from_json, grid_spec_to_json, grid_to_graph, parse_cell
from .runtime import (
    SATISFIED,
    UNDETERMINED,
    VIOLATED,
    Configuration,
    History,
    TraceRecord,
    Verdict,
    adversary_tender,
    check_objective,
    compatibility_epsilon,
    compose_step,
    default_split,
    read_trace_jsonl,
    run_composition,
    trace_record_from_json,
    trace_record_to_json,
    verdicts_to_json,
    write_trace_csv,
    write_trace_jsonl,
)
from .synthesis import (
    FAIL,
    MODE_AA,
    MODE_AG,
    MODE_STRONG,
    NON_BINARY_FLAG,
    SUCCESS,
    Contract,
    SynthesisOutcome,
    Tender,
    contract_from_json,
    contract_subgraph,
    contract_to_json,
    las_buchi,
    las_reach,
    make_tender,
    objectives_overlap,
    outcome_to_json,
    reachability_core,
    synth_assume_admissible_buchi,
    synth_assume_admissible_reach,
    synth_assume_guarantee,
    synth_strong,
    synthesize,
    tender_from_json,
    tender_to_json,
)
from .thresholds import (
    EXACT,
    ITERATIVE,
    SolverConfig,
    ThresholdMap,
    brute_force_oracle,
    solve_objective,
    solve_parity,
    solve_reach,
    solve_reach_general,
    threshold_map_from_json,
    threshold_map_to_json,
)

__version__ = "0.1.0"

__all__ = [
    "BUCHI",
    "BidschedError",
    "Configuration",
    "Contract",
    "EXACT",
    "FAIL",
    "Graph",
    "GridSpec",
    "History",
    "ITERATIVE",
    "InputError",
    "MODE_AA",
    "MODE_AG",
    "MODE_STRONG",
    "NON_BINARY_FLAG",
    "Objective",
    "OracleError",
    "PARITY",
    "PrunedStartError",
    "REACH",
    "SAFETY",
    "SATISFIED",
    "SUCCESS",
    "SinkifyResult",
    "SolverConfig",
    "SolverError",
    "SynthesisOutcome",
    "Tender",
    "ThresholdMap",
    "TraceRecord",
    "UNDETERMINED",
    "VIOLATED",
    "Verdict",
    "adversary_tender",
    "base_vertex",
    "brute_force_oracle",
    "cell_name",
    "check_objective",
    "compatibility_epsilon",
    "compose_step",
    "contract_from_json",
    "contract_subgraph",
    "contract_to_json",
    "default_split",
    "generate_grid",
    "graph_from_json",
    "graph_to_json",
    "grid_spec_from_json",
    "grid_spec_to_json",
    "grid_to_graph",
    "is_acyclic",
    "is_binary",
    "las_buchi",
    "las_reach",
    "make_graph",
    "make_tender",
    "objective_from_json",
    "objective_to_json",
    "objectives_overlap",
    "outcome_to_json",
    "parse_cell",
    "reachability_core",
    "reachable_from",
    "reachable_to",
    "read_trace_jsonl",
    "run_composition",
    "scc_decompose",
    "sinkify",
    "solve_objective",
    "solve_parity",
    "solve_reach",
    "solve_reach_general",
    "synth_assume_admissible_buchi",
    "synth_assume_admissible_reach",
    "synth_assume_guarantee",
    "synth_strong",
    "synthesize",
    "tender_from_json",
    "tender_to_json",
    "threshold_map_from_json",
    "threshold_map_to_json",
    "to_dot",
    "trace_record_from_json",
    "trace_record_to_json",
    "validate",
    "verdicts_to_json",
    "write_trace_csv",
    "write_trace_jsonl",
]
