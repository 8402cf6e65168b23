//! First-moment estimates for random 3-CNF: expected numbers of assignments
//! satisfying many clauses, the ratio past which a constant number of
//! violations becomes unlikely, and the largest satisfiable fraction `h(r)`.
//!
//! Everything is computed as base-2 logarithms; `2^n` is never formed.

use std::f64::consts::LN_2;

use thiserror::Error;

/// Probability that a uniformly random assignment satisfies a random 3-clause.
pub const CLAUSE_SAT_PROB: f64 = 7.0 / 8.0;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("satisfied-clause target {s} exceeds clause count {m}")]
    TargetTooLarge { s: u64, m: u64 },
    #[error("fraction {0} must lie strictly between 0 and 1")]
    FractionOutOfRange(f64),
    #[error("ratio {0} must be positive")]
    NonPositiveRatio(f64),
    #[error("no root of the exponent in (7/8, 1) at ratio {0}")]
    NoRoot(f64),
    #[error("expected count is below one at ratio {r} and fraction {lambda}")]
    NoSolutions { r: f64, lambda: f64 },
}

/// `log2 C(m, s)` through log-gamma.
pub fn log2_binomial(m: u64, s: u64) -> f64 {
    debug_assert!(s <= m);
    if s == 0 || s == m {
        return 0.0;
    }
    let ln = libm::lgamma(m as f64 + 1.0) - libm::lgamma(s as f64 + 1.0) - libm::lgamma((m - s) as f64 + 1.0);
    ln / LN_2
}

/// `log2( 2^n (7/8)^s C(m, s) )`.
pub fn log2_expected_count(n: u64, m: u64, s: u64) -> Result<f64, TheoryError> {
    if s > m {
        return Err(TheoryError::TargetTooLarge { s, m });
    }
    Ok(n as f64 + s as f64 * CLAUSE_SAT_PROB.log2() + log2_binomial(m, s))
}

/// Base-2 exponent of the asymptotic expected count of assignments
/// satisfying `lambda * m` clauses, divided by `m = r n`:
/// `1/r + log2(1/(1-lambda)) + lambda log2(7(1-lambda) / (8 lambda))`.
pub fn exponent_per_clause(r: f64, lambda: f64) -> Result<f64, TheoryError> {
    if !(r > 0.0) {
        return Err(TheoryError::NonPositiveRatio(r));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(TheoryError::FractionOutOfRange(lambda));
    }
    Ok(exponent_unchecked(r, lambda))
}

fn exponent_unchecked(r: f64, lambda: f64) -> f64 {
    let rest = 1.0 - lambda;
    1.0 / r - rest.log2() + lambda * (7.0 * rest / (8.0 * lambda)).log2()
}

/// `-1 / log2(7/8)`: above this ratio, assignments violating only a
/// constant number of clauses are exponentially unlikely.
pub fn constant_violation_threshold() -> f64 {
    -1.0 / CLAUSE_SAT_PROB.log2()
}

const BRACKET_LO: f64 = 7.0 / 8.0 + 1e-6;
const BRACKET_HI: f64 = 1.0 - 1e-9;
const ROOT_TOL: f64 = 1e-9;

/// The fraction `lambda` in `(7/8, 1)` where [`exponent_per_clause`]
/// crosses zero, by bisection.
pub fn h_of_r(r: f64) -> Result<f64, TheoryError> {
    if !(r > 0.0) {
        return Err(TheoryError::NonPositiveRatio(r));
    }
    let (mut lo, mut hi) = (BRACKET_LO, BRACKET_HI);
    let f_lo = exponent_unchecked(r, lo);
    let f_hi = exponent_unchecked(r, hi);
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(TheoryError::NoRoot(r));
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let f_mid = exponent_unchecked(r, mid);
        if f_mid.abs() < ROOT_TOL {
            break;
        }
        if f_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// `n - log2 E[X_{lambda m}]`, with the count capped at `2^n`: how many
/// variables separate a random assignment from the plentiful solutions
/// satisfying a `lambda` fraction of clauses.
pub fn hamming_gap(r: f64, lambda: f64, n: f64) -> Result<f64, TheoryError> {
    let exponent = exponent_per_clause(r, lambda)?;
    if exponent < 0.0 {
        return Err(TheoryError::NoSolutions { r, lambda });
    }
    let log2_count = (exponent * r * n).min(n);
    Ok(n - log2_count)
}
