//! WebAssembly bindings for the static page in `www/`.
//!
//! Three operations: the satisfiable-fraction curve, best-so-far traces of
//! three solver configurations on one random formula, and the pick
//! distribution of a single clause. Results are flat numeric arrays so the
//! page can draw them without any glue types.

use proms::theory;
use proms::{
    generate, selection_probabilities, ClauseSelection, GenSpec, ProMsPicker, ProbSatPicker, ScoreFn, Search,
    SolverParams, VariablePicker,
};
use wasm_bindgen::prelude::*;

/// `[threshold, r0, h(r0), r1, h(r1), ...]` for `points` ratios evenly
/// spaced over `[r_min, r_max]`. Ratios without a root are skipped.
pub fn satisfiable_fraction_curve(r_min: f64, r_max: f64, points: usize) -> Vec<f64> {
    let mut out = vec![theory::constant_violation_threshold()];
    let points = points.max(2);
    for i in 0..points {
        let r = r_min + (r_max - r_min) * i as f64 / (points - 1) as f64;
        if let Ok(h) = theory::h_of_r(r) {
            out.push(r);
            out.push(h);
        }
    }
    out
}

/// Series order in [`convergence_traces`].
pub const TRACE_SERIES: [&str; 3] = ["proms, second-in-queue", "proms, uniform clause", "probsat"];

/// Best unsatisfied count after every `every` steps, for each entry of
/// [`TRACE_SERIES`], concatenated. Each series has `steps / every + 1`
/// samples, starting with the initial assignment. A series that satisfies
/// the formula is padded with zeros.
pub fn convergence_traces(num_vars: usize, num_clauses: usize, seed: u64, steps: u64, every: u64) -> Result<Vec<u32>, String> {
    let formula = generate(&GenSpec { num_vars, num_clauses, k: 3, seed }).map_err(|e| e.to_string())?;
    let every = every.max(1);
    let mut params = SolverParams::for_ratio(formula.ratio());
    params.seed = seed;
    let mut out = Vec::new();
    for series in 0..TRACE_SERIES.len() {
        params.clause_selection = if series == 0 { ClauseSelection::Sbfs } else { ClauseSelection::Rs };
        match series {
            2 => trace_into(Search::new(&formula, &params, ProbSatPicker::new(0.9, 2.06)), steps, every, &mut out),
            _ => trace_into(Search::new(&formula, &params, ProMsPicker::from_params(&params)), steps, every, &mut out),
        }
    }
    Ok(out)
}

fn trace_into<P: VariablePicker>(mut search: Search<'_, P>, steps: u64, every: u64, out: &mut Vec<u32>) {
    out.push(search.state().best_unsat() as u32);
    for i in 1..=steps {
        search.step();
        if i % every == 0 {
            out.push(search.state().best_unsat() as u32);
        }
    }
}

/// Pick probability of each variable of one unsatisfied clause with the
/// given make and break values.
pub fn pick_distribution(makes: &[u32], breaks: &[u32], zeta: f64, eta: f64, delta: f64) -> Result<Vec<f64>, String> {
    if makes.len() != breaks.len() || makes.is_empty() {
        return Err("need one make and one break value per variable".into());
    }
    if makes.contains(&0) {
        return Err("every variable of an unsatisfied clause has make at least 1".into());
    }
    let score = ScoreFn::new(zeta, eta);
    let scores: Vec<f64> = makes.iter().zip(breaks).map(|(&m, &b)| score.score(m, b)).collect();
    Ok(selection_probabilities(&scores, delta))
}

#[wasm_bindgen(js_name = satisfiableFractionCurve)]
pub fn satisfiable_fraction_curve_js(r_min: f64, r_max: f64, points: usize) -> Vec<f64> {
    satisfiable_fraction_curve(r_min, r_max, points)
}

#[wasm_bindgen(js_name = convergenceTraces)]
pub fn convergence_traces_js(num_vars: usize, num_clauses: usize, seed: u32, steps: u32, every: u32) -> Result<Vec<u32>, JsError> {
    convergence_traces(num_vars, num_clauses, seed as u64, steps as u64, every as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = pickDistribution)]
pub fn pick_distribution_js(makes: &[u32], breaks: &[u32], zeta: f64, eta: f64, delta: f64) -> Result<Vec<f64>, JsError> {
    pick_distribution(makes, breaks, zeta, eta, delta).map_err(|e| JsError::new(&e))
}

/// Default score parameters for a clause/variable ratio: `[zeta, eta, delta]`.
#[wasm_bindgen(js_name = defaultScoreParams)]
pub fn default_score_params(ratio: f64) -> Vec<f64> {
    let p = SolverParams::for_ratio(ratio);
    vec![p.zeta, p.eta, p.delta]
}
