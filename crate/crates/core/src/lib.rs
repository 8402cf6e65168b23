//! Stochastic local search for unweighted Max-SAT.
//!
//! Variables are chosen from an unsatisfied clause with probability
//! proportional to `make^zeta * (1 + break)^eta`, falling back to a uniform
//! pick when the clause's total score is below a threshold. Clauses are
//! chosen second-best breadth-first from an insertion-ordered queue.
//!
//! ```
//! use proms::{generate, default_params, solve, GenSpec};
//!
//! let formula = generate(&GenSpec { num_vars: 40, num_clauses: 320, k: 3, seed: 1 }).unwrap();
//! let params = proms::SolverParams { max_steps: 10_000, ..default_params(&formula) };
//! let result = solve(&formula, &params).unwrap();
//! assert!(result.best_unsat <= 320);
//! ```

pub mod baselines;
pub mod buffer;
pub mod cnf;
pub mod generator;
pub mod solver;
pub mod state;
pub mod theory;

pub use baselines::{BaselineParams, ProbSatPicker, WalkSatPicker};
pub use cnf::{
    brute_force_make_break, brute_force_optimum, count_unsat, parse_dimacs, Assignment, Formula, Lit, ParseError,
};
pub use generator::{generate, GenSpec};
pub use solver::{
    default_params, score, selection_probabilities, solve, solve_with, ProMsPicker, RunResult, ScoreFn, Search, SolverParams, SolverRng,
    VariablePicker,
};
pub use state::{ClauseSelection, Scheme, SearchState};
