use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use proms::{solve_with, Formula, ProMsPicker, ProbSatPicker, RunResult, Scheme, SolverParams, WalkSatPicker};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

use crate::config::{BenchConfig, ConfigError, SolverKind};

/// One benchmark instance found on disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceFile {
    pub path: PathBuf,
    /// File name, used as the instance key in records and optima files.
    pub name: String,
    /// Directory name for instances found by walking a directory, file stem
    /// for instances given directly.
    pub class: String,
}

/// Everything needed to rebuild a results table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub class: String,
    pub solver: SolverKind,
    pub seed: u64,
    pub best: usize,
    pub steps: u64,
    pub steps_to_best: u64,
    pub time_to_best: f64,
    pub wall_time: f64,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: proms::ParseError },
    #[error("{path}:{line}: {reason}")]
    Optima { path: PathBuf, line: usize, reason: String },
}

/// Files ending in `.cnf` under each path; plain files are taken as given.
pub fn discover_instances(paths: &[PathBuf]) -> Result<Vec<InstanceFile>, BenchError> {
    let mut found = Vec::new();
    for path in paths {
        let meta = fs::metadata(path).map_err(|source| BenchError::Io { path: path.clone(), source })?;
        if meta.is_file() {
            found.push(InstanceFile {
                path: path.clone(),
                name: file_name(path),
                class: path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned()),
            });
            continue;
        }
        let mut files: Vec<PathBuf> = WalkDir::new(path)
            .into_iter()
            .filter_map(Result::ok)
            .filter(|e| e.file_type().is_file() && e.path().extension().is_some_and(|x| x == "cnf"))
            .map(|e| e.into_path())
            .collect();
        files.sort();
        for file in files {
            let class = file
                .parent()
                .and_then(Path::file_name)
                .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            found.push(InstanceFile { name: file_name(&file), path: file, class });
        }
    }
    Ok(found)
}

fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned())
}

pub fn load_formula(path: &Path) -> Result<Formula, BenchError> {
    let file = fs::File::open(path).map_err(|source| BenchError::Io { path: path.into(), source })?;
    proms::parse_dimacs(std::io::BufReader::new(file)).map_err(|source| BenchError::Parse { path: path.into(), source })
}

/// Reads `<instance> <optimum>` lines; `#` starts a comment.
pub fn parse_optima(path: &Path) -> Result<HashMap<String, usize>, BenchError> {
    let text = fs::read_to_string(path).map_err(|source| BenchError::Io { path: path.into(), source })?;
    let mut optima = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: &str| BenchError::Optima { path: path.into(), line: i + 1, reason: reason.into() };
        let mut fields = line.split_whitespace();
        let (Some(name), Some(value), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err("expected `<instance> <optimum>`"));
        };
        let value = value.parse().map_err(|_| err("optimum is not a non-negative integer"))?;
        optima.insert(name.to_string(), value);
    }
    Ok(optima)
}

/// Runs one solver with the configured picker.
pub fn run_solver(solver: SolverKind, formula: &Formula, params: &SolverParams, cfg: &BenchConfig) -> RunResult {
    let result = match solver {
        SolverKind::Proms => solve_with(formula, params, ProMsPicker::from_params(params)),
        SolverKind::Probsat => solve_with(formula, params, ProbSatPicker::from_params(&cfg.baseline)),
        SolverKind::Walksat => solve_with(formula, params, WalkSatPicker::from_params(&cfg.baseline)),
    };
    result.expect("parameters validated with the config")
}

pub struct BenchOutcome {
    pub records: Vec<RunRecord>,
    /// Instances that could not be read or parsed; they were skipped.
    pub failures: Vec<BenchError>,
}

/// Runs every solver `cfg.runs` times on every instance. Run `i` uses seed
/// `seed_base + i`; runs execute in parallel on `cfg.workers` threads, each
/// run single-threaded. Records come back in (instance, solver, run) order.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchOutcome, BenchError> {
    cfg.validate()?;
    let optima = match &cfg.optima {
        Some(path) => parse_optima(path)?,
        None => HashMap::new(),
    };
    let mut failures = Vec::new();
    let mut loaded = Vec::new();
    for inst in discover_instances(&cfg.paths)? {
        match load_formula(&inst.path) {
            Ok(f) => loaded.push((inst, f)),
            Err(e) => failures.push(e),
        }
    }

    let tasks: Vec<(usize, SolverKind, u64)> = loaded
        .iter()
        .enumerate()
        .flat_map(|(i, _)| {
            cfg.solvers
                .iter()
                .flat_map(move |&s| (0..cfg.runs as u64).map(move |r| (i, s, r)))
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .expect("thread pool");
    let records = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(i, solver, run)| {
                let (inst, formula) = &loaded[i];
                let seed = cfg.seed_base + run;
                let target = optima.get(&inst.name).copied();
                let params = cfg.solver_params(solver, formula, seed, target);
                let r = run_solver(solver, formula, &params, cfg);
                RunRecord {
                    instance: inst.name.clone(),
                    class: inst.class.clone(),
                    solver,
                    seed,
                    best: r.best_unsat,
                    steps: r.steps,
                    steps_to_best: r.steps_to_best,
                    time_to_best: r.time_to_best,
                    wall_time: r.wall_time,
                }
            })
            .collect()
    });
    Ok(BenchOutcome { records, failures })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProbeBudget {
    Seconds(f64),
    Steps(u64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeResult {
    pub steps: u64,
    pub wall_time: f64,
    pub flips_per_second: f64,
}

/// Runs ProMS with the given caching scheme and reports its flip rate.
/// On a satisfiable formula the run ends at the first model, which may be
/// well inside the budget.
pub fn flips_per_second_probe(formula: &Formula, scheme: Scheme, budget: ProbeBudget, seed: u64) -> ProbeResult {
    let mut params = proms::default_params(formula);
    params.scheme = scheme;
    params.seed = seed;
    match budget {
        ProbeBudget::Seconds(s) => params.cutoff = Some(Duration::from_secs_f64(s)),
        ProbeBudget::Steps(n) => params.max_steps = n.max(1),
    }
    let r = proms::solve(formula, &params).expect("default parameters are valid");
    ProbeResult { steps: r.steps, wall_time: r.wall_time, flips_per_second: r.flips_per_second }
}
