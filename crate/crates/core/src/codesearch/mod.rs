//! Numerical feasibility of the Knill–Laflamme conditions.
//!
//! [`objective`] vanishes exactly on pairs spanning a code; [`search_pair`] and
//! [`search_code`] minimize it from seeded random starts. The zero-pair solver and
//! the linear-algebra oracles cover the structured linear systems of the two-channel
//! analysis.

mod oracles;
mod objective;
mod search;
mod zero_pair;

pub use oracles::{
    parallel_triple, al2_case, al2_instance, al3_factor, al3_instance, rank_check_instance, parallel_rank_check, Al2Case,
    Al3Verdict, ParallelVerdict, RankVerdict,
};
pub use objective::{gauge_invariant_objective, objective, objective_frame, objective_gradient, UNIT_TOL};
pub use search::{
    initial_frame, merge, run_restart, search_code, search_pair, FeasibilityReport, RestartOutcome, SearchOptions,
    DEFAULT_SEARCH_TOL,
};
pub use zero_pair::{
    p_values, s_matrix, solve_zero_pair, w_matrix, ZeroPairResult, ZeroPairSolution, VANISH_TOL,
};
