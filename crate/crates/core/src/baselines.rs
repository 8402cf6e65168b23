//! Break-only reference pickers: probSAT's polynomial distribution and
//! classic WalkSAT with noise.

use rand::Rng;

use crate::solver::{sample_categorical, VariablePicker};
use crate::state::SearchState;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaselineParams {
    /// probSAT break base.
    pub cb: f64,
    /// probSAT exponent.
    pub k: f64,
    /// WalkSAT noise probability.
    pub noise: f64,
}

impl Default for BaselineParams {
    fn default() -> Self {
        BaselineParams { cb: 0.9, k: 2.06, noise: 0.567 }
    }
}

/// `v` with probability proportional to `(cb + break(v))^-k`.
#[derive(Clone, Debug)]
pub struct ProbSatPicker {
    cb: f64,
    k: f64,
    scratch: Vec<f64>,
}

impl ProbSatPicker {
    pub fn new(cb: f64, k: f64) -> Self {
        assert!(k > 0.0, "probSAT exponent must be positive");
        ProbSatPicker { cb, k, scratch: Vec::new() }
    }

    pub fn from_params(p: &BaselineParams) -> Self {
        ProbSatPicker::new(p.cb, p.k)
    }

    fn weights(&self, clause: usize, state: &SearchState<'_>, out: &mut Vec<f64>) -> f64 {
        out.clear();
        let mut total = 0.0;
        for lit in state.formula().clause(clause) {
            let w = (self.cb + state.break_value(lit.var()) as f64).powf(-self.k);
            out.push(w);
            total += w;
        }
        total
    }
}

impl VariablePicker for ProbSatPicker {
    fn pick<R: Rng + ?Sized>(&mut self, clause: usize, state: &SearchState<'_>, rng: &mut R) -> usize {
        let mut scratch = std::mem::take(&mut self.scratch);
        let total = self.weights(clause, state, &mut scratch);
        let idx = sample_categorical(&scratch, total, rng);
        self.scratch = scratch;
        state.formula().clause(clause)[idx].var()
    }

    fn probabilities(&self, clause: usize, state: &SearchState<'_>) -> Vec<f64> {
        let mut w = Vec::new();
        let total = self.weights(clause, state, &mut w);
        w.iter().map(|x| x / total).collect()
    }
}

/// Zero-break variables first; otherwise a noisy choice between a random
/// variable and a minimum-break one.
#[derive(Clone, Debug)]
pub struct WalkSatPicker {
    noise: f64,
    breaks: Vec<u32>,
    candidates: Vec<usize>,
}

impl WalkSatPicker {
    pub fn new(noise: f64) -> Self {
        assert!((0.0..=1.0).contains(&noise), "noise must lie in [0, 1]");
        WalkSatPicker { noise, breaks: Vec::new(), candidates: Vec::new() }
    }

    pub fn from_params(p: &BaselineParams) -> Self {
        WalkSatPicker::new(p.noise)
    }
}

fn indices_of_min(values: &[u32], out: &mut Vec<usize>) -> u32 {
    let min = values.iter().copied().min().unwrap_or(0);
    out.clear();
    out.extend(values.iter().enumerate().filter(|&(_, &b)| b == min).map(|(i, _)| i));
    min
}

impl VariablePicker for WalkSatPicker {
    fn pick<R: Rng + ?Sized>(&mut self, clause: usize, state: &SearchState<'_>, rng: &mut R) -> usize {
        let lits = state.formula().clause(clause);
        self.breaks.clear();
        self.breaks.extend(lits.iter().map(|l| state.break_value(l.var())));
        let min = indices_of_min(&self.breaks, &mut self.candidates);
        let idx = if min == 0 || rng.gen::<f64>() >= self.noise {
            self.candidates[rng.gen_range(0..self.candidates.len())]
        } else {
            rng.gen_range(0..lits.len())
        };
        lits[idx].var()
    }

    fn probabilities(&self, clause: usize, state: &SearchState<'_>) -> Vec<f64> {
        let lits = state.formula().clause(clause);
        let breaks: Vec<u32> = lits.iter().map(|l| state.break_value(l.var())).collect();
        let mut best = Vec::new();
        let min = indices_of_min(&breaks, &mut best);
        let len = lits.len() as f64;
        let greedy = if min == 0 { 1.0 } else { 1.0 - self.noise };
        let random = 1.0 - greedy;
        (0..lits.len())
            .map(|i| {
                let g = if best.contains(&i) { greedy / best.len() as f64 } else { 0.0 };
                g + random / len
            })
            .collect()
    }
}
