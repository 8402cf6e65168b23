//! Aggregation of run records into per-class opt./avg./time summaries.
//!
//! The best solution of an instance is the minimum over every record of that
//! instance in the session, whatever the solver. A run is successful when it
//! reached that value. For each class and solver:
//!
//! * `opt` averages, over instances, the solver's best run;
//! * `avg` averages, over instances, the solver's mean run;
//! * `time` is the mean time-to-best of the solver's successful runs, or
//!   absent when there were none.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::config::SolverKind;
use crate::runner::RunRecord;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: String,
    pub solver: SolverKind,
    pub instances: usize,
    pub runs: usize,
    pub opt: f64,
    pub avg: f64,
    pub time: Option<f64>,
    pub successes: usize,
}

/// Minimum `best` per instance over all records.
pub fn session_best(records: &[RunRecord]) -> HashMap<&str, usize> {
    let mut best: HashMap<&str, usize> = HashMap::new();
    for r in records {
        best.entry(&r.instance)
            .and_modify(|b| *b = (*b).min(r.best))
            .or_insert(r.best);
    }
    best
}

/// Solvers in order of first appearance.
fn solver_order(records: &[RunRecord]) -> Vec<SolverKind> {
    let mut order = Vec::new();
    for r in records {
        if !order.contains(&r.solver) {
            order.push(r.solver);
        }
    }
    order
}

/// Runs of each instance, instances in order of appearance.
type InstanceRuns<'a> = Vec<(&'a str, Vec<&'a RunRecord>)>;

/// Summaries sorted by class name, then by solver order of appearance.
pub fn summarize(records: &[RunRecord]) -> Vec<ClassSummary> {
    let best = session_best(records);
    let solvers = solver_order(records);

    let mut grouped: BTreeMap<&str, HashMap<SolverKind, InstanceRuns>> = BTreeMap::new();
    for r in records {
        let per_solver = grouped.entry(&r.class).or_default().entry(r.solver).or_default();
        match per_solver.iter_mut().find(|(name, _)| *name == r.instance) {
            Some((_, runs)) => runs.push(r),
            None => per_solver.push((&r.instance, vec![r])),
        }
    }

    let mut out = Vec::new();
    for (class, by_solver) in &grouped {
        for solver in &solvers {
            let Some(instances) = by_solver.get(solver) else { continue };
            let mut opt_sum = 0.0;
            let mut avg_sum = 0.0;
            let mut time_sum = 0.0;
            let mut successes = 0;
            let mut runs = 0;
            for (name, recs) in instances {
                let target = best[name];
                opt_sum += recs.iter().map(|r| r.best).min().unwrap_or(0) as f64;
                avg_sum += recs.iter().map(|r| r.best as f64).sum::<f64>() / recs.len() as f64;
                for r in recs.iter().filter(|r| r.best == target) {
                    successes += 1;
                    time_sum += r.time_to_best;
                }
                runs += recs.len();
            }
            let k = instances.len() as f64;
            out.push(ClassSummary {
                class: class.to_string(),
                solver: *solver,
                instances: instances.len(),
                runs,
                opt: opt_sum / k,
                avg: avg_sum / k,
                time: (successes > 0).then(|| time_sum / successes as f64),
                successes,
            });
        }
    }
    out
}

/// Fixed-width table, one row per class, three columns per solver.
pub fn render_table(summaries: &[ClassSummary]) -> String {
    let mut solvers: Vec<SolverKind> = Vec::new();
    for s in summaries {
        if !solvers.contains(&s.solver) {
            solvers.push(s.solver);
        }
    }
    let mut classes: Vec<&str> = summaries.iter().map(|s| s.class.as_str()).collect();
    classes.dedup();
    let width = classes.iter().map(|c| c.len()).max().unwrap_or(0).max("instance".len());

    let mut out = String::new();
    let _ = write!(out, "{:<width$}", "instance");
    for s in &solvers {
        let _ = write!(out, " | {:^22}", s.name());
    }
    out.push('\n');
    let _ = write!(out, "{:<width$}", "");
    for _ in &solvers {
        let _ = write!(out, " | {:>6} {:>7} {:>7}", "opt.", "avg.", "time");
    }
    out.push('\n');
    let _ = write!(out, "{}", "-".repeat(width));
    for _ in &solvers {
        out.push_str("-+-");
        out.push_str(&"-".repeat(22));
    }
    out.push('\n');

    for class in classes {
        let _ = write!(out, "{class:<width$}");
        for solver in &solvers {
            match summaries.iter().find(|s| s.class == class && s.solver == *solver) {
                Some(s) => {
                    let time = s.time.map_or_else(|| "-".to_string(), |t| format!("{t:.2}"));
                    let _ = write!(out, " | {:>6.2} {:>7.3} {:>7}", s.opt, s.avg, time);
                }
                None => {
                    let _ = write!(out, " | {:>6} {:>7} {:>7}", "", "", "");
                }
            }
        }
        out.push('\n');
    }
    out
}

pub fn to_jsonl(records: &[RunRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<RunRecord>, serde_json::Error> {
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(serde_json::Error::io)?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}
