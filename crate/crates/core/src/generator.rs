//! Uniform random k-SAT instances.
//!
//! Each clause draws `k` distinct variables by rejection (redraw on repeat)
//! from a ChaCha8 stream seeded with the spec's seed, then negates each one
//! with probability 1/2. Duplicate clauses are allowed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cnf::{Formula, Lit};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub num_vars: usize,
    pub num_clauses: usize,
    pub k: usize,
    pub seed: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("clause length {k} exceeds variable count {num_vars}")]
    ClauseTooLong { k: usize, num_vars: usize },
    #[error("clause length must be at least 1")]
    ZeroClauseLength,
}

pub fn generate(spec: &GenSpec) -> Result<Formula, GenError> {
    if spec.k == 0 {
        return Err(GenError::ZeroClauseLength);
    }
    if spec.k > spec.num_vars {
        return Err(GenError::ClauseTooLong { k: spec.k, num_vars: spec.num_vars });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut clauses = Vec::with_capacity(spec.num_clauses);
    for _ in 0..spec.num_clauses {
        let mut clause: Vec<Lit> = Vec::with_capacity(spec.k);
        while clause.len() < spec.k {
            let var = rng.gen_range(0..spec.num_vars);
            if clause.iter().any(|l| l.var() == var) {
                continue;
            }
            clause.push(Lit::new(var, rng.gen::<bool>()));
        }
        clauses.push(clause);
    }
    Ok(Formula::new(spec.num_vars, clauses).expect("generated clauses are well formed"))
}
