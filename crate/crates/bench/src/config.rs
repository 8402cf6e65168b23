use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use proms::{BaselineParams, ClauseSelection, Formula, Scheme, SolverParams};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Proms,
    Probsat,
    Walksat,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Proms => "proms",
            SolverKind::Probsat => "probsat",
            SolverKind::Walksat => "walksat",
        }
    }

    /// The break-only baselines pick clauses uniformly unless told otherwise.
    pub fn default_clause_selection(self) -> ClauseSelection {
        match self {
            SolverKind::Proms => ClauseSelection::Sbfs,
            SolverKind::Probsat | SolverKind::Walksat => ClauseSelection::Rs,
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "proms" => Ok(SolverKind::Proms),
            "probsat" => Ok(SolverKind::Probsat),
            "walksat" => Ok(SolverKind::Walksat),
            _ => Err(format!("unknown solver `{s}` (expected proms, probsat or walksat)")),
        }
    }
}

/// Command-line overrides applied on top of the ratio-based defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub zeta: Option<f64>,
    pub eta: Option<f64>,
    pub delta: Option<f64>,
    pub m_max_factor: Option<f64>,
    pub scheme: Option<Scheme>,
    pub clause_selection: Option<ClauseSelection>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Jsonl,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "table" => Ok(OutputFormat::Table),
            "jsonl" => Ok(OutputFormat::Jsonl),
            _ => Err(format!("unknown format `{s}` (expected table or jsonl)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub paths: Vec<PathBuf>,
    pub solvers: Vec<SolverKind>,
    pub runs: usize,
    pub cutoff: Option<Duration>,
    pub max_steps: u64,
    pub seed_base: u64,
    pub workers: usize,
    pub overrides: Overrides,
    pub baseline: BaselineParams,
    pub optima: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            paths: Vec::new(),
            solvers: vec![SolverKind::Proms],
            runs: 1,
            cutoff: Some(Duration::from_secs(300)),
            max_steps: proms::solver::DEFAULT_MAX_STEPS,
            seed_base: 0,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            overrides: Overrides::default(),
            baseline: BaselineParams::default(),
            optima: None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("runs per instance must be at least 1")]
    NoRuns,
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("no solver selected")]
    NoSolver,
    #[error("probSAT exponent must be positive")]
    ProbSatExponent,
    #[error("WalkSAT noise must lie in [0, 1]")]
    Noise,
    #[error(transparent)]
    Params(#[from] proms::solver::ParamError),
    #[error(transparent)]
    Generator(#[from] proms::generator::GenError),
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.runs == 0 {
            return Err(ConfigError::NoRuns);
        }
        if self.workers == 0 {
            return Err(ConfigError::NoWorkers);
        }
        if self.solvers.is_empty() {
            return Err(ConfigError::NoSolver);
        }
        if !(self.baseline.k > 0.0) {
            return Err(ConfigError::ProbSatExponent);
        }
        if !(0.0..=1.0).contains(&self.baseline.noise) {
            return Err(ConfigError::Noise);
        }
        // catches bad overrides before any instance is touched
        let probe = Formula::new(1, vec![vec![proms::Lit::new(0, true)]]).expect("valid");
        for &solver in &self.solvers {
            self.solver_params(solver, &probe, 0, None).validate()?;
        }
        Ok(())
    }

    /// Parameters for one run of `solver` on `formula`.
    pub fn solver_params(&self, solver: SolverKind, formula: &Formula, seed: u64, target: Option<usize>) -> SolverParams {
        let o = &self.overrides;
        let mut p = proms::default_params(formula);
        p.zeta = o.zeta.unwrap_or(p.zeta);
        p.eta = o.eta.unwrap_or(p.eta);
        p.delta = o.delta.unwrap_or(p.delta);
        p.m_max_factor = o.m_max_factor.unwrap_or(p.m_max_factor);
        p.scheme = o.scheme.unwrap_or(p.scheme);
        p.clause_selection = o.clause_selection.unwrap_or(solver.default_clause_selection());
        p.max_steps = self.max_steps;
        p.cutoff = self.cutoff;
        p.seed = seed;
        p.target_unsat = target;
        p
    }
}
