//! The search loop and the make/break probability-distribution picker.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cnf::{Assignment, Formula};
use crate::state::{ClauseSelection, Scheme, SearchState};

/// Random source for every run: ChaCha with 8 rounds, seeded via
/// `seed_from_u64`, so streams are identical across platforms.
pub type SolverRng = ChaCha8Rng;

/// Flip budget used when none is given (`2^63 - 1`).
pub const DEFAULT_MAX_STEPS: u64 = i64::MAX as u64;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverParams {
    /// Exponent on the make value.
    pub zeta: f64,
    /// Exponent on `1 + break`.
    pub eta: f64,
    /// Clause-score threshold below which the pick is uniform.
    pub delta: f64,
    pub max_steps: u64,
    /// Defragmentation threshold as a multiple of the clause count.
    pub m_max_factor: f64,
    pub scheme: Scheme,
    pub clause_selection: ClauseSelection,
    pub seed: u64,
    pub cutoff: Option<Duration>,
    /// Stop as soon as the incumbent reaches this many unsatisfied clauses.
    pub target_unsat: Option<usize>,
}

impl SolverParams {
    /// Ratio-based defaults: `eta = -2.5`, `zeta = r + 17.5`,
    /// `delta = max(0, 0.4 r - 1.4)`, `m_max = 4.5 m`.
    pub fn for_ratio(r: f64) -> SolverParams {
        SolverParams {
            zeta: r + 17.5,
            eta: -2.5,
            delta: (0.4 * r - 1.4).max(0.0),
            max_steps: DEFAULT_MAX_STEPS,
            m_max_factor: 4.5,
            scheme: Scheme::Mcbn,
            clause_selection: ClauseSelection::Sbfs,
            seed: 0,
            cutoff: None,
            target_unsat: None,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if self.max_steps == 0 {
            return Err(ParamError::ZeroSteps);
        }
        if !(self.m_max_factor >= 1.0 && self.m_max_factor.is_finite()) {
            return Err(ParamError::MaxTailFactor(self.m_max_factor));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(ParamError::Delta(self.delta));
        }
        if !self.zeta.is_finite() || !self.eta.is_finite() {
            return Err(ParamError::Exponent);
        }
        Ok(())
    }

    /// Slot-array length that triggers defragmentation for `num_clauses`.
    pub fn max_tail(&self, num_clauses: usize) -> usize {
        ((self.m_max_factor * num_clauses as f64).ceil() as usize).max(1)
    }
}

/// Parameters derived from the formula's clause/variable ratio.
pub fn default_params(formula: &Formula) -> SolverParams {
    SolverParams::for_ratio(formula.ratio())
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("step budget must be at least 1")]
    ZeroSteps,
    #[error("m_max factor must be >= 1, got {0}")]
    MaxTailFactor(f64),
    #[error("delta must be a finite value >= 0, got {0}")]
    Delta(f64),
    #[error("zeta and eta must be finite")]
    Exponent,
}

/// Anything that chooses a variable from an unsatisfied clause.
pub trait VariablePicker {
    fn pick<R: Rng + ?Sized>(&mut self, clause: usize, state: &SearchState<'_>, rng: &mut R) -> usize;

    /// Exact probability of picking each literal's variable, in clause order.
    fn probabilities(&self, clause: usize, state: &SearchState<'_>) -> Vec<f64>;
}

const POW_TABLE_LEN: usize = 65;

/// `f(v) = make^zeta * (base + break)^eta`, with `base = 1`.
///
/// Powers for make and break values below 65 come from tables filled with
/// the same `powf` calls used for larger values, so results are identical.
#[derive(Clone, Debug)]
pub struct ScoreFn {
    zeta: f64,
    eta: f64,
    break_base: f64,
    make_pow: Vec<f64>,
    break_pow: Vec<f64>,
}

impl ScoreFn {
    pub fn new(zeta: f64, eta: f64) -> ScoreFn {
        ScoreFn::with_break_base(zeta, eta, 1.0)
    }

    /// Replaces the `1` in `(1 + break)`; lets tests line the score up with
    /// break-only probability functions.
    #[doc(hidden)]
    pub fn with_break_base(zeta: f64, eta: f64, break_base: f64) -> ScoreFn {
        ScoreFn {
            zeta,
            eta,
            break_base,
            make_pow: (0..POW_TABLE_LEN).map(|m| (m as f64).powf(zeta)).collect(),
            break_pow: (0..POW_TABLE_LEN).map(|b| (break_base + b as f64).powf(eta)).collect(),
        }
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    #[inline]
    pub fn score(&self, make: u32, brk: u32) -> f64 {
        let mp = match self.make_pow.get(make as usize) {
            Some(&p) => p,
            None => (make as f64).powf(self.zeta),
        };
        let bp = match self.break_pow.get(brk as usize) {
            Some(&p) => p,
            None => (self.break_base + brk as f64).powf(self.eta),
        };
        mp * bp
    }
}

/// Direct evaluation of `make^zeta * (1 + break)^eta`.
pub fn score(make: u32, brk: u32, zeta: f64, eta: f64) -> f64 {
    (make as f64).powf(zeta) * (1.0 + brk as f64).powf(eta)
}

/// Index drawn with probability `weights[i] / total` from one uniform draw.
pub(crate) fn sample_categorical<R: Rng + ?Sized>(weights: &[f64], total: f64, rng: &mut R) -> usize {
    let target = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return i;
        }
    }
    // rounding left `target` at or past the final sum
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}

/// First index of the largest weight.
pub(crate) fn argmax(weights: &[f64]) -> usize {
    let mut best = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > weights[best] {
            best = i;
        }
    }
    best
}

/// Pick probabilities for a clause whose variables have the given scores:
/// `f / tau` when `tau = sum(f)` exceeds `delta`, uniform otherwise, and all
/// mass on the first maximum when `tau` is not finite.
pub fn selection_probabilities(scores: &[f64], delta: f64) -> Vec<f64> {
    let tau: f64 = scores.iter().sum();
    let len = scores.len();
    if !tau.is_finite() {
        let best = argmax(scores);
        (0..len).map(|i| if i == best { 1.0 } else { 0.0 }).collect()
    } else if tau > delta {
        scores.iter().map(|f| f / tau).collect()
    } else {
        vec![1.0 / len as f64; len]
    }
}

/// Picks with probability `f(v) / tau(c)` when the clause score `tau(c)`
/// exceeds `delta`, uniformly otherwise.
#[derive(Clone, Debug)]
pub struct ProMsPicker {
    score: ScoreFn,
    delta: f64,
    scratch: Vec<f64>,
}

impl ProMsPicker {
    pub fn new(score: ScoreFn, delta: f64) -> ProMsPicker {
        ProMsPicker { score, delta, scratch: Vec::new() }
    }

    pub fn from_params(params: &SolverParams) -> ProMsPicker {
        ProMsPicker::new(ScoreFn::new(params.zeta, params.eta), params.delta)
    }

    pub fn score_fn(&self) -> &ScoreFn {
        &self.score
    }

    fn fill_scores(&self, clause: usize, state: &SearchState<'_>, out: &mut Vec<f64>) -> f64 {
        out.clear();
        let mut tau = 0.0;
        for lit in state.formula().clause(clause) {
            let v = lit.var();
            let f = self.score.score(state.make_value(v), state.break_value(v));
            out.push(f);
            tau += f;
        }
        tau
    }
}

impl VariablePicker for ProMsPicker {
    fn pick<R: Rng + ?Sized>(&mut self, clause: usize, state: &SearchState<'_>, rng: &mut R) -> usize {
        let mut scratch = std::mem::take(&mut self.scratch);
        let tau = self.fill_scores(clause, state, &mut scratch);
        let lits = state.formula().clause(clause);
        let idx = if !tau.is_finite() {
            argmax(&scratch)
        } else if tau > self.delta {
            sample_categorical(&scratch, tau, rng)
        } else {
            rng.gen_range(0..lits.len())
        };
        self.scratch = scratch;
        lits[idx].var()
    }

    fn probabilities(&self, clause: usize, state: &SearchState<'_>) -> Vec<f64> {
        let mut scores = Vec::new();
        self.fill_scores(clause, state, &mut scores);
        selection_probabilities(&scores, self.delta)
    }
}

/// One executed search step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub clause: usize,
    pub var: usize,
    /// The flip produced a new incumbent.
    pub improved: bool,
}

/// Stepwise driver around a [`SearchState`]. Has no notion of time, so it
/// also runs where no clock is available.
pub struct Search<'f, P> {
    state: SearchState<'f>,
    picker: P,
    rng: SolverRng,
    steps: u64,
}

impl<'f, P: VariablePicker> Search<'f, P> {
    /// Seeds the generator and draws the initial assignment from it.
    pub fn new(formula: &'f Formula, params: &SolverParams, picker: P) -> Self {
        let mut rng = SolverRng::seed_from_u64(params.seed);
        let assignment = Assignment::random(formula.num_vars(), &mut rng);
        let state = SearchState::new(
            formula,
            assignment,
            params.scheme,
            params.clause_selection,
            params.max_tail(formula.num_clauses()),
        );
        Search { state, picker, rng, steps: 0 }
    }

    /// Picks a clause, picks a variable, flips it. `None` when every clause
    /// is already satisfied.
    pub fn step(&mut self) -> Option<Step> {
        let clause = self.state.pick_clause(&mut self.rng)?;
        let var = self.picker.pick(clause, &self.state, &mut self.rng);
        let improved = self.state.flip(var);
        self.steps += 1;
        Some(Step { clause, var, improved })
    }

    pub fn state(&self) -> &SearchState<'f> {
        &self.state
    }

    pub fn picker(&self) -> &P {
        &self.picker
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn into_state(self) -> SearchState<'f> {
        self.state
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub best_unsat: usize,
    pub best_assignment: Assignment,
    pub steps: u64,
    /// Step at which the incumbent was last improved (0 = initial assignment).
    pub steps_to_best: u64,
    /// Seconds.
    pub wall_time: f64,
    /// Seconds from the start of the run to the last improvement.
    pub time_to_best: f64,
    pub flips_per_second: f64,
    pub defrags: u64,
}

/// Runs ProMS with the given parameters.
pub fn solve(formula: &Formula, params: &SolverParams) -> Result<RunResult, ParamError> {
    solve_with(formula, params, ProMsPicker::from_params(params))
}

/// Runs the search loop with any variable picker until the step budget,
/// the cutoff, the target or a satisfying assignment is reached.
pub fn solve_with<P: VariablePicker>(
    formula: &Formula,
    params: &SolverParams,
    picker: P,
) -> Result<RunResult, ParamError> {
    params.validate()?;
    let start = Instant::now();
    let mut search = Search::new(formula, params, picker);
    let target = params.target_unsat.unwrap_or(0);
    let mut steps_to_best = 0;
    let mut time_to_best = start.elapsed();

    while search.steps() < params.max_steps && search.state().best_unsat() > target {
        if let Some(cutoff) = params.cutoff {
            if search.steps().is_multiple_of(64) && start.elapsed() >= cutoff {
                break;
            }
        }
        let Some(step) = search.step() else { break };
        if step.improved {
            steps_to_best = search.steps();
            time_to_best = start.elapsed();
        }
    }

    let wall = start.elapsed().as_secs_f64();
    let steps = search.steps();
    let state = search.into_state();
    Ok(RunResult {
        best_unsat: state.best_unsat(),
        defrags: state.defrag_count(),
        best_assignment: state.into_best_assignment(),
        steps,
        steps_to_best,
        wall_time: wall,
        time_to_best: time_to_best.as_secs_f64().min(wall),
        flips_per_second: if wall > 0.0 { steps as f64 / wall } else { 0.0 },
    })
}
