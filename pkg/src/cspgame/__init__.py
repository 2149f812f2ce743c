"""Competing Salesmen Problem: rules, exact solver, strategies, reduction,
instance catalog, verification suites, CLI, and play service."""

from .model import (
    DRAW,
    GameState,
    Graph,
    IllegalMoveError,
    Instance,
    Move,
    Outcome,
    Player,
    RulesError,
    apply_move,
    instance_from_dict,
    instance_to_dict,
    legal_moves,
    load_instance,
    outcome_key,
    save_instance,
    shift_outcome,
    shortest_distance,
    terminal_status,
    two_coloring,
    validate_instance,
)
from .solver import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    SolveResult,
    SolveStats,
    best_move,
    force_set,
    oracle_value,
    solve,
    solve_value,
)
from .strategies import (
    MatchRecord,
    PlyCapExceeded,
    Strategy,
    apriori_strategy,
    best_response,
    greedy_strategy,
    make_strategy,
    optimal_strategy,
    random_strategy,
    run_match,
    steal_strategy,
)

__version__ = "0.1.0"
