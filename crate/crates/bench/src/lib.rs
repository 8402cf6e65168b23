//! Benchmark harness for the proms solver: instance discovery, seeded
//! multi-run execution, and opt./avg./time tables over instance classes.

pub mod config;
pub mod report;
pub mod runner;

pub use config::{BenchConfig, OutputFormat, Overrides, SolverKind};
pub use report::{render_table, summarize, ClassSummary};
pub use runner::{flips_per_second_probe, run_bench, ProbeBudget, RunRecord};
