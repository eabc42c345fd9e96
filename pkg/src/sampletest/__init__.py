"""Sample-and-test satisfiability search for random k-CNF, with the instance
distributions, Hamming-ball searches and exhaustive oracles used to check it."""

from .cnf import (
    Assignment,
    Formula,
    Literal,
    StructureError,
    eval_clause,
    hamming_distance,
    num_clauses_sat,
    num_clauses_unsat,
)
from .dimacs import DimacsError, load_dimacs, read_dimacs, save_dimacs, write_dimacs
from .distributions import (
    ThresholdModel,
    sample_assignment_uniform,
    sample_clause_replace,
    sample_falsified_clause,
    sample_formula_fixed_m,
    sample_in_ball_exact,
    sample_m_at_threshold,
    sample_planted_clause,
    sample_planted_formula,
    sample_threshold_formula,
    threshold_density,
)
from .oracle import brute_force_solve, count_satisfying, expected_count_planted, planted_unsat_prob
from .rng import RandomStream
from .search import Inconclusive, SearchStats, exhaustive_ball_search, sat_from_small_hd, solve_small_k
from .solver import (
    RateEstimates,
    SolveResult,
    SolverParams,
    alpha_sample_and_test,
    compute_alpha,
    compute_budgets,
    compute_threshold,
    predicted_runtime,
)
from .analysis import classify_formula, estimate_rates, histogram_num_sat, is_standard

__version__ = "0.1.0"
