//! Incremental search state: per-clause true-literal counts, make/break
//! values under the four caching schemes, the unsatisfied-clause buffer and
//! the incumbent.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::buffer::{DenseUnsatBuffer, SlottedUnsatBuffer};
use crate::cnf::{Assignment, Formula};

/// Which of make and break values are maintained incrementally.
///
/// `C` = cached, `N` = computed on demand; the first letter is for make,
/// the second for break. Cached break values use the XOR trick to find the
/// sole satisfying variable of a clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Scheme {
    Mcbc,
    #[default]
    Mcbn,
    Mnbc,
    Mnbn,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Mcbc, Scheme::Mcbn, Scheme::Mnbc, Scheme::Mnbn];

    pub fn caches_make(self) -> bool {
        matches!(self, Scheme::Mcbc | Scheme::Mcbn)
    }

    pub fn caches_break(self) -> bool {
        matches!(self, Scheme::Mcbc | Scheme::Mnbc)
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Mcbc => "mcbc",
            Scheme::Mcbn => "mcbn",
            Scheme::Mnbc => "mnbc",
            Scheme::Mnbn => "mnbn",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown scheme `{s}` (expected mcbc, mcbn, mnbc or mnbn)"))
    }
}

/// How the next unsatisfied clause is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ClauseSelection {
    /// Second element of an insertion-ordered queue, first rotated to the back.
    #[default]
    Sbfs,
    /// Element `s mod |C_U|` of a swap-remove array, `s` counting steps.
    Pbfs,
    /// Uniformly random element of a swap-remove array.
    Rs,
}

impl ClauseSelection {
    pub const ALL: [ClauseSelection; 3] = [ClauseSelection::Sbfs, ClauseSelection::Pbfs, ClauseSelection::Rs];

    pub fn name(self) -> &'static str {
        match self {
            ClauseSelection::Sbfs => "sbfs",
            ClauseSelection::Pbfs => "pbfs",
            ClauseSelection::Rs => "rs",
        }
    }
}

impl fmt::Display for ClauseSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClauseSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ClauseSelection::ALL
            .into_iter()
            .find(|sel| sel.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown clause selection `{s}` (expected sbfs, pbfs or rs)"))
    }
}

#[derive(Clone, Debug)]
pub enum UnsatBuffer {
    Slotted(SlottedUnsatBuffer),
    Dense(DenseUnsatBuffer),
}

impl UnsatBuffer {
    pub fn len(&self) -> usize {
        match self {
            UnsatBuffer::Slotted(b) => b.len(),
            UnsatBuffer::Dense(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, clause: usize) -> bool {
        match self {
            UnsatBuffer::Slotted(b) => b.contains(clause),
            UnsatBuffer::Dense(b) => b.contains(clause),
        }
    }

    #[inline]
    fn insert(&mut self, clause: usize) {
        match self {
            UnsatBuffer::Slotted(b) => b.insert(clause),
            UnsatBuffer::Dense(b) => b.insert(clause),
        }
    }

    #[inline]
    fn remove(&mut self, clause: usize) {
        match self {
            UnsatBuffer::Slotted(b) => b.remove(clause),
            UnsatBuffer::Dense(b) => b.remove(clause),
        }
    }

    pub fn check_invariants(&self) -> Result<(), String> {
        match self {
            UnsatBuffer::Slotted(b) => b.check_invariants(),
            UnsatBuffer::Dense(b) => b.check_invariants(),
        }
    }

    /// Buffer contents, sorted.
    pub fn sorted_contents(&self) -> Vec<usize> {
        let mut v: Vec<usize> = match self {
            UnsatBuffer::Slotted(b) => b.iter().collect(),
            UnsatBuffer::Dense(b) => b.as_slice().iter().map(|&c| c as usize).collect(),
        };
        v.sort_unstable();
        v
    }

    pub fn defrag_count(&self) -> u64 {
        match self {
            UnsatBuffer::Slotted(b) => b.defrag_count(),
            UnsatBuffer::Dense(_) => 0,
        }
    }
}

/// Counts of true-literal transitions seen while flipping.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TransitionStats {
    /// Every change of a clause's true-literal count.
    pub total: u64,
    /// 0->1 and 1->0: these change make values.
    pub make_affecting: u64,
    /// 0->1, 1->0, 1->2 and 2->1: these change break values.
    pub break_affecting: u64,
}

#[derive(Clone, Debug)]
pub struct SearchState<'f> {
    formula: &'f Formula,
    assignment: Assignment,
    scheme: Scheme,
    selection: ClauseSelection,
    true_count: Vec<u32>,
    /// XOR of the variables whose literal is true in each clause; empty
    /// unless break values are cached.
    crit_xor: Vec<u32>,
    make: Vec<u32>,
    brk: Vec<u32>,
    unsat: UnsatBuffer,
    best_unsat: usize,
    best_assignment: Assignment,
    transitions: TransitionStats,
}

impl<'f> SearchState<'f> {
    /// Builds a state consistent with `assignment`. `max_tail` is the
    /// defragmentation threshold for the slotted buffer.
    pub fn new(
        formula: &'f Formula,
        assignment: Assignment,
        scheme: Scheme,
        selection: ClauseSelection,
        max_tail: usize,
    ) -> Self {
        let n = formula.num_vars();
        let m = formula.num_clauses();
        assert_eq!(assignment.len(), n, "assignment length does not match formula");

        let mut unsat = match selection {
            ClauseSelection::Sbfs => UnsatBuffer::Slotted(SlottedUnsatBuffer::new(m, max_tail)),
            ClauseSelection::Pbfs | ClauseSelection::Rs => UnsatBuffer::Dense(DenseUnsatBuffer::new(m)),
        };
        let mut true_count = vec![0u32; m];
        let mut crit_xor = if scheme.caches_break() { vec![0u32; m] } else { Vec::new() };
        let mut make = if scheme.caches_make() { vec![0u32; n] } else { Vec::new() };
        let mut brk = if scheme.caches_break() { vec![0u32; n] } else { Vec::new() };

        for (ci, clause) in formula.clauses().enumerate() {
            let mut count = 0;
            let mut xor = 0;
            for &lit in clause {
                if assignment.is_true(lit) {
                    count += 1;
                    xor ^= lit.var() as u32;
                }
            }
            true_count[ci] = count;
            if scheme.caches_break() {
                crit_xor[ci] = xor;
                if count == 1 {
                    brk[xor as usize] += 1;
                }
            }
            if count == 0 {
                unsat.insert(ci);
                if scheme.caches_make() {
                    for &lit in clause {
                        make[lit.var()] += 1;
                    }
                }
            }
        }

        let best_unsat = unsat.len();
        SearchState {
            formula,
            best_assignment: assignment.clone(),
            assignment,
            scheme,
            selection,
            true_count,
            crit_xor,
            make,
            brk,
            unsat,
            best_unsat,
            transitions: TransitionStats::default(),
        }
    }

    pub fn formula(&self) -> &'f Formula {
        self.formula
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn selection(&self) -> ClauseSelection {
        self.selection
    }

    /// |C_U| for the current assignment.
    pub fn num_unsat(&self) -> usize {
        self.unsat.len()
    }

    pub fn best_unsat(&self) -> usize {
        self.best_unsat
    }

    pub fn best_assignment(&self) -> &Assignment {
        &self.best_assignment
    }

    pub fn into_best_assignment(self) -> Assignment {
        self.best_assignment
    }

    pub fn true_count(&self, clause: usize) -> u32 {
        self.true_count[clause]
    }

    /// The XOR of true variables of `clause`, when the scheme maintains it.
    pub fn crit_xor(&self, clause: usize) -> Option<u32> {
        self.crit_xor.get(clause).copied()
    }

    pub fn unsat_buffer(&self) -> &UnsatBuffer {
        &self.unsat
    }

    pub fn transitions(&self) -> TransitionStats {
        self.transitions
    }

    pub fn defrag_count(&self) -> u64 {
        self.unsat.defrag_count()
    }

    /// Number of clauses that flipping `var` would satisfy.
    #[inline]
    pub fn make_value(&self, var: usize) -> u32 {
        if self.scheme.caches_make() {
            return self.make[var];
        }
        let false_lit = !self.assignment.true_lit(var);
        self.formula
            .occurrences(false_lit)
            .iter()
            .filter(|&&c| self.true_count[c as usize] == 0)
            .count() as u32
    }

    /// Number of clauses that flipping `var` would falsify.
    #[inline]
    pub fn break_value(&self, var: usize) -> u32 {
        if self.scheme.caches_break() {
            return self.brk[var];
        }
        // `var` satisfies every clause in this list, so a count of one means
        // it is the only true literal there.
        let true_lit = self.assignment.true_lit(var);
        self.formula
            .occurrences(true_lit)
            .iter()
            .filter(|&&c| self.true_count[c as usize] == 1)
            .count() as u32
    }

    /// Chooses the next unsatisfied clause per the configured strategy.
    /// `None` means every clause is satisfied.
    pub fn pick_clause<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<usize> {
        match &mut self.unsat {
            UnsatBuffer::Slotted(b) => b.pick(),
            UnsatBuffer::Dense(b) => match self.selection {
                ClauseSelection::Pbfs => b.pick_pbfs(),
                _ => b.pick_random(rng),
            },
        }
    }

    /// Flips `var`, updating counters, caches and the buffer. Returns true
    /// when the flip produced a new incumbent.
    pub fn flip(&mut self, var: usize) -> bool {
        let formula = self.formula;
        let was_true = self.assignment.true_lit(var);
        let now_true = !was_true;
        self.assignment.flip(var);
        let make_cached = self.scheme.caches_make();
        let break_cached = self.scheme.caches_break();
        let v = var as u32;

        for &c in formula.occurrences(now_true) {
            let c = c as usize;
            let count = self.true_count[c];
            self.true_count[c] = count + 1;
            self.transitions.total += 1;
            match count {
                0 => {
                    self.transitions.make_affecting += 1;
                    self.transitions.break_affecting += 1;
                    self.unsat.remove(c);
                    if make_cached {
                        for &lit in formula.clause(c) {
                            self.make[lit.var()] -= 1;
                        }
                    }
                    if break_cached {
                        self.brk[var] += 1;
                        self.crit_xor[c] = v;
                    }
                }
                1 => {
                    self.transitions.break_affecting += 1;
                    if break_cached {
                        self.brk[self.crit_xor[c] as usize] -= 1;
                        self.crit_xor[c] ^= v;
                    }
                }
                _ => {
                    if break_cached {
                        self.crit_xor[c] ^= v;
                    }
                }
            }
        }

        for &c in formula.occurrences(was_true) {
            let c = c as usize;
            let count = self.true_count[c] - 1;
            self.true_count[c] = count;
            self.transitions.total += 1;
            match count {
                0 => {
                    self.transitions.make_affecting += 1;
                    self.transitions.break_affecting += 1;
                    self.unsat.insert(c);
                    if make_cached {
                        for &lit in formula.clause(c) {
                            self.make[lit.var()] += 1;
                        }
                    }
                    if break_cached {
                        self.brk[var] -= 1;
                        self.crit_xor[c] = 0;
                    }
                }
                1 => {
                    self.transitions.break_affecting += 1;
                    if break_cached {
                        let crit = self.crit_xor[c] ^ v;
                        self.crit_xor[c] = crit;
                        self.brk[crit as usize] += 1;
                    }
                }
                _ => {
                    if break_cached {
                        self.crit_xor[c] ^= v;
                    }
                }
            }
        }

        if self.unsat.len() < self.best_unsat {
            self.best_unsat = self.unsat.len();
            self.best_assignment.clone_from(&self.assignment);
            true
        } else {
            false
        }
    }

    /// Compares every counter, cache and the buffer against a rescan of the
    /// formula under the current assignment.
    pub fn check_consistency(&self) -> Result<(), String> {
        let f = self.formula;
        for (ci, clause) in f.clauses().enumerate() {
            let trues: Vec<usize> = clause
                .iter()
                .filter(|&&l| self.assignment.is_true(l))
                .map(|l| l.var())
                .collect();
            if self.true_count[ci] as usize != trues.len() {
                return Err(format!("clause {ci}: true_count {} != {}", self.true_count[ci], trues.len()));
            }
            if let Some(xor) = self.crit_xor(ci) {
                let expected = trues.iter().fold(0u32, |acc, &v| acc ^ v as u32);
                if xor != expected {
                    return Err(format!("clause {ci}: crit_xor {xor} != {expected}"));
                }
            }
            if self.unsat.contains(ci) != trues.is_empty() {
                return Err(format!("clause {ci}: buffer membership wrong"));
            }
        }
        self.unsat.check_invariants()?;
        for var in 0..f.num_vars() {
            let expected = crate::cnf::brute_force_make_break(f, &self.assignment, var);
            let got = (self.make_value(var), self.break_value(var));
            if got != expected {
                return Err(format!("var {var}: (make, break) = {got:?}, expected {expected:?}"));
            }
        }
        Ok(())
    }
}
