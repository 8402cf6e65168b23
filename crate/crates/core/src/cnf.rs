//! CNF formulas, DIMACS input/output, complete assignments and the slow
//! rescanning oracles that the incremental search state is checked against.

use std::fmt;
use std::io::Read;

use rand::Rng;
use thiserror::Error;

/// A literal packed as `2 * var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: usize, positive: bool) -> Lit {
        Lit(((var as u32) << 1) | (!positive as u32))
    }

    /// Builds a literal from a non-zero DIMACS integer (1-based, sign = polarity).
    pub fn from_dimacs(value: i64) -> Lit {
        debug_assert!(value != 0);
        Lit::new((value.unsigned_abs() - 1) as usize, value > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var() as i64 + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    #[inline]
    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense index in `0..2n`, used for occurrence lists.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("formula must have at least one variable")]
    NoVariables,
    #[error("clause {clause} is empty")]
    EmptyClause { clause: usize },
    #[error("clause {clause}: literal {lit} out of range for {num_vars} variables")]
    LiteralOutOfRange { clause: usize, lit: i64, num_vars: usize },
    #[error("clause {clause}: variable {var} occurs more than once")]
    DuplicateVariable { clause: usize, var: usize },
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: weighted instances (p wcnf) are not supported")]
    Weighted { line: usize },
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("line {line}: invalid token `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: clause data before the header")]
    ClauseBeforeHeader { line: usize },
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    UnterminatedClause,
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Immutable CNF formula with per-literal occurrence lists.
///
/// Clause literals are stored in one flat array; `starts[i]..starts[i + 1]`
/// delimits clause `i`.
#[derive(Clone, PartialEq, Eq)]
pub struct Formula {
    num_vars: usize,
    lits: Vec<Lit>,
    starts: Vec<u32>,
    occ: Vec<Vec<u32>>,
}

impl Formula {
    /// Validates and indexes a clause list. Variables are 0-based.
    pub fn new(num_vars: usize, clauses: Vec<Vec<Lit>>) -> Result<Formula, FormulaError> {
        if num_vars == 0 {
            return Err(FormulaError::NoVariables);
        }
        let total: usize = clauses.iter().map(Vec::len).sum();
        let mut lits = Vec::with_capacity(total);
        let mut starts = Vec::with_capacity(clauses.len() + 1);
        let mut occ = vec![Vec::new(); 2 * num_vars];
        // last clause index each variable was seen in, to catch repeats
        let mut seen = vec![usize::MAX; num_vars];
        starts.push(0);
        for (ci, clause) in clauses.into_iter().enumerate() {
            if clause.is_empty() {
                return Err(FormulaError::EmptyClause { clause: ci });
            }
            for lit in clause {
                let var = lit.var();
                if var >= num_vars {
                    return Err(FormulaError::LiteralOutOfRange {
                        clause: ci,
                        lit: lit.to_dimacs(),
                        num_vars,
                    });
                }
                if seen[var] == ci {
                    return Err(FormulaError::DuplicateVariable { clause: ci, var: var + 1 });
                }
                seen[var] = ci;
                occ[lit.index()].push(ci as u32);
                lits.push(lit);
            }
            starts.push(lits.len() as u32);
        }
        Ok(Formula { num_vars, lits, starts, occ })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.starts.len() - 1
    }

    /// Clause-to-variable ratio `m / n`.
    pub fn ratio(&self) -> f64 {
        self.num_clauses() as f64 / self.num_vars as f64
    }

    #[inline]
    pub fn clause(&self, index: usize) -> &[Lit] {
        &self.lits[self.starts[index] as usize..self.starts[index + 1] as usize]
    }

    pub fn clauses(&self) -> impl ExactSizeIterator<Item = &[Lit]> + '_ {
        (0..self.num_clauses()).map(move |i| self.clause(i))
    }

    /// Indices of the clauses containing `lit`, in increasing order.
    #[inline]
    pub fn occurrences(&self, lit: Lit) -> &[u32] {
        &self.occ[lit.index()]
    }

    pub fn num_literal_occurrences(&self) -> usize {
        self.lits.len()
    }

    pub fn max_clause_len(&self) -> usize {
        self.clauses().map(<[Lit]>::len).max().unwrap_or(0)
    }

    /// Serializes to DIMACS CNF.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.num_clauses());
        for clause in self.clauses() {
            for lit in clause {
                out.push_str(&lit.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Formula")
            .field("num_vars", &self.num_vars)
            .field("clauses", &self.clauses().collect::<Vec<_>>())
            .finish()
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Formula, ParseError> {
        parse_dimacs_str(s)
    }
}

/// Reads a DIMACS CNF formula from a byte stream.
pub fn parse_dimacs<R: Read>(mut reader: R) -> Result<Formula, ParseError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_dimacs_str(&text)
}

pub fn parse_dimacs_str(text: &str) -> Result<Formula, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        // SATLIB uniform instances end with a `%` line followed by junk.
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(ParseError::MalformedHeader {
                    line: lineno,
                    reason: "duplicate header".into(),
                });
            }
            header = Some(parse_header(trimmed, lineno)?);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(ParseError::ClauseBeforeHeader { line: lineno });
        };
        for token in trimmed.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| ParseError::InvalidToken {
                line: lineno,
                token: token.to_string(),
            })?;
            if value == 0 {
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if value.unsigned_abs() > num_vars as u64 {
                return Err(FormulaError::LiteralOutOfRange {
                    clause: clauses.len(),
                    lit: value,
                    num_vars,
                }
                .into());
            }
            current.push(Lit::from_dimacs(value));
        }
    }

    let (num_vars, num_clauses) = header.ok_or(ParseError::MissingHeader)?;
    if !current.is_empty() {
        return Err(ParseError::UnterminatedClause);
    }
    if clauses.len() != num_clauses {
        return Err(ParseError::ClauseCountMismatch {
            declared: num_clauses,
            found: clauses.len(),
        });
    }
    Ok(Formula::new(num_vars, clauses)?)
}

fn parse_header(line: &str, lineno: usize) -> Result<(usize, usize), ParseError> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let malformed = |reason: &str| ParseError::MalformedHeader {
        line: lineno,
        reason: reason.to_string(),
    };
    if fields.len() < 2 || fields[0] != "p" {
        return Err(malformed("expected `p cnf <vars> <clauses>`"));
    }
    match fields[1] {
        "cnf" => {}
        "wcnf" => return Err(ParseError::Weighted { line: lineno }),
        other => return Err(malformed(&format!("unknown format `{other}`"))),
    }
    if fields.len() != 4 {
        return Err(malformed("expected `p cnf <vars> <clauses>`"));
    }
    let n = fields[2].parse().map_err(|_| malformed("bad variable count"))?;
    let m = fields[3].parse().map_err(|_| malformed("bad clause count"))?;
    if n == 0 {
        return Err(malformed("variable count must be positive"));
    }
    Ok((n, m))
}

/// A complete truth assignment.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(values: Vec<bool>) -> Assignment {
        Assignment(values)
    }

    /// Draws every variable independently and uniformly, in variable order.
    pub fn random<R: Rng + ?Sized>(num_vars: usize, rng: &mut R) -> Assignment {
        Assignment((0..num_vars).map(|_| rng.gen::<bool>()).collect())
    }

    pub fn all_false(num_vars: usize) -> Assignment {
        Assignment(vec![false; num_vars])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn value(&self, var: usize) -> bool {
        self.0[var]
    }

    #[inline]
    pub fn is_true(&self, lit: Lit) -> bool {
        self.0[lit.var()] == lit.is_positive()
    }

    #[inline]
    pub fn flip(&mut self, var: usize) {
        self.0[var] = !self.0[var];
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    /// The literal of `var` that is currently true.
    #[inline]
    pub fn true_lit(&self, var: usize) -> Lit {
        Lit::new(var, self.0[var])
    }
}

impl From<Vec<bool>> for Assignment {
    fn from(values: Vec<bool>) -> Self {
        Assignment(values)
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: String = self.0.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(f, "Assignment({bits})")
    }
}

pub fn is_clause_satisfied(clause: &[Lit], assignment: &Assignment) -> bool {
    clause.iter().any(|&lit| assignment.is_true(lit))
}

/// Number of clauses with no true literal.
pub fn count_unsat(formula: &Formula, assignment: &Assignment) -> usize {
    formula
        .clauses()
        .filter(|c| !is_clause_satisfied(c, assignment))
        .count()
}

/// Make and break values of `var` by rescanning every clause.
pub fn brute_force_make_break(formula: &Formula, assignment: &Assignment, var: usize) -> (u32, u32) {
    let mut flipped = assignment.clone();
    flipped.flip(var);
    let mut make = 0;
    let mut brk = 0;
    for clause in formula.clauses() {
        match (
            is_clause_satisfied(clause, assignment),
            is_clause_satisfied(clause, &flipped),
        ) {
            (false, true) => make += 1,
            (true, false) => brk += 1,
            _ => {}
        }
    }
    (make, brk)
}

/// Largest variable count accepted by [`brute_force_optimum`].
pub const MAX_ENUMERATION_VARS: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{num_vars} variables is too many to enumerate (limit {MAX_ENUMERATION_VARS})")]
pub struct EnumerationTooLarge {
    pub num_vars: usize,
}

/// Exact minimum number of unsatisfied clauses over all `2^n` assignments.
///
/// Walks the assignments in Gray-code order so each step flips one variable
/// and only touches that variable's occurrence lists.
pub fn brute_force_optimum(formula: &Formula) -> Result<usize, EnumerationTooLarge> {
    let n = formula.num_vars();
    if n > MAX_ENUMERATION_VARS {
        return Err(EnumerationTooLarge { num_vars: n });
    }
    let mut assignment = Assignment::all_false(n);
    let mut true_count: Vec<u32> = formula
        .clauses()
        .map(|c| c.iter().filter(|&&l| assignment.is_true(l)).count() as u32)
        .collect();
    let mut unsat = true_count.iter().filter(|&&t| t == 0).count();
    let mut best = unsat;
    for step in 1u64..(1u64 << n) {
        if best == 0 {
            break;
        }
        let var = step.trailing_zeros() as usize;
        let was_true = assignment.true_lit(var);
        assignment.flip(var);
        for &c in formula.occurrences(!was_true) {
            let t = &mut true_count[c as usize];
            if *t == 0 {
                unsat -= 1;
            }
            *t += 1;
        }
        for &c in formula.occurrences(was_true) {
            let t = &mut true_count[c as usize];
            *t -= 1;
            if *t == 0 {
                unsat += 1;
            }
        }
        best = best.min(unsat);
    }
    Ok(best)
}
