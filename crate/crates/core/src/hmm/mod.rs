//! Hidden Markov models with continuous and finite observations.
//!
//! A [`ContinuousHMM`] stores, for each pair of states, an optional
//! `(probability, profile)` entry: the chain moves from `i` to `j` with the
//! given probability and emits an observation drawn from the profile's
//! density. Absent entries are structural zeros.

mod reduce;

use std::collections::HashSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{RMatrix, RVector, Rational};
use crate::profile::{nonnegativity_lint, ProfileExpr, Violation, DEFAULT_LINT_GRID};

pub use reduce::{
    finite_reduction, functional_decomposition, labelling_reduction, nonneg_reduction, theta,
    FunctionalDecomposition, Reduction,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub prob: Rational,
    pub profile: ProfileExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuousHMM {
    states: Vec<String>,
    psi: Vec<Option<Transition>>,
}

impl ContinuousHMM {
    pub fn new(states: Vec<String>) -> Self {
        let n = states.len();
        ContinuousHMM {
            states,
            psi: vec![None; n * n],
        }
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn set(&mut self, from: usize, to: usize, prob: Rational, profile: ProfileExpr) {
        let n = self.num_states();
        self.psi[from * n + to] = Some(Transition { prob, profile });
    }

    pub fn remove(&mut self, from: usize, to: usize) {
        let n = self.num_states();
        self.psi[from * n + to] = None;
    }

    pub fn get(&self, from: usize, to: usize) -> Option<&Transition> {
        self.psi[from * self.num_states() + to].as_ref()
    }

    /// Present entries in row-major order.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, &Transition)> {
        let n = self.num_states();
        self.psi
            .iter()
            .enumerate()
            .filter_map(move |(k, t)| t.as_ref().map(|t| (k / n, k % n, t)))
    }

    /// Distinct profiles in row-major order of first appearance, and for each
    /// present entry the index of its profile in that list.
    pub fn distinct_profiles(&self) -> (Vec<ProfileExpr>, Vec<(usize, usize, usize)>) {
        let mut profiles: Vec<ProfileExpr> = Vec::new();
        let mut uses = Vec::new();
        let mut seen = std::collections::HashMap::new();
        for (i, j, t) in self.transitions() {
            let idx = *seen.entry(&t.profile).or_insert_with(|| {
                profiles.push(t.profile.clone());
                profiles.len() - 1
            });
            uses.push((i, j, idx));
        }
        (profiles, uses)
    }

    /// Matrix of transition probabilities, i.e. the integral of the density
    /// matrix over the observation space.
    pub fn probability_matrix(&self) -> RMatrix {
        let n = self.num_states();
        let mut m = RMatrix::zeros(n, n);
        for (i, j, t) in self.transitions() {
            m[(i, j)] = t.prob.clone();
        }
        m
    }

    /// State `i` renamed to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> ContinuousHMM {
        let n = self.num_states();
        let mut states = vec![String::new(); n];
        for (i, s) in self.states.iter().enumerate() {
            states[perm[i]] = s.clone();
        }
        let mut out = ContinuousHMM::new(states);
        for (i, j, t) in self.transitions() {
            out.set(perm[i], perm[j], t.prob.clone(), t.profile.clone());
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    /// `(from, to)` entry the diagnostic refers to, if any.
    pub entry: Option<(usize, usize)>,
    pub message: String,
}

impl Diagnostic {
    fn error(entry: Option<(usize, usize)>, message: String) -> Self {
        Diagnostic {
            severity: Severity::Error,
            entry,
            message,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

/// All diagnostics, including the numeric non-negativity lint.
pub fn validate(h: &ContinuousHMM) -> Vec<Diagnostic> {
    validate_with(h, Some(DEFAULT_LINT_GRID))
}

/// Exact checks always run; the lint runs when `lint_grid` is set.
pub fn validate_with(h: &ContinuousHMM, lint_grid: Option<usize>) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let names = h.states();
    let mut seen = HashSet::new();
    for s in names {
        if !seen.insert(s) {
            out.push(Diagnostic::error(None, format!("duplicate state `{s}`")));
        }
    }
    if names.is_empty() {
        out.push(Diagnostic::error(None, "model has no states".into()));
    }

    for (i, j, t) in h.transitions() {
        let at = format!("{} -> {}", names[i], names[j]);
        if !t.prob.is_positive() {
            out.push(Diagnostic::error(
                Some((i, j)),
                format!("{at}: probability {} must be positive", t.prob),
            ));
        }
        let mass = t.profile.total_mass();
        if !mass.is_one() {
            out.push(Diagnostic::error(
                Some((i, j)),
                format!("{at}: density `{}` has total mass {mass}, expected 1", t.profile),
            ));
        }
    }
    for (i, sum) in h.probability_matrix().row_sums().iter().enumerate() {
        if !sum.is_one() {
            out.push(Diagnostic::error(
                None,
                format!("state {}: outgoing probabilities sum to {sum}, expected 1", names[i]),
            ));
        }
    }

    if let Some(grid) = lint_grid {
        let (profiles, uses) = h.distinct_profiles();
        for (k, p) in profiles.iter().enumerate() {
            let violations = nonnegativity_lint(p, grid);
            let Some(first) = violations.first() else {
                continue;
            };
            let (i, j, _) = uses.iter().find(|u| u.2 == k).copied().expect("profile is used");
            let detail = match first {
                Violation::Range { from, to, worst } => {
                    format!("negative on [{from}, {to}] (down to {worst:e})")
                }
                Violation::Symbol { symbol, mass } => format!("negative mass {mass} on `{symbol}`"),
            };
            out.push(Diagnostic {
                severity: Severity::Warning,
                entry: Some((i, j)),
                message: format!(
                    "{} -> {}: density `{p}` is not non-negative: {detail}",
                    names[i], names[j]
                ),
            });
        }
    }
    out
}

/// Initial distribution over states.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InitialDistribution {
    weights: RVector,
}

impl InitialDistribution {
    /// Weights must be non-negative and sum to exactly one.
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::InvalidDistribution(format!("negative weight {w}")));
        }
        let sum = weights.iter().fold(Rational::zero(), |acc, w| acc + w);
        if !sum.is_one() {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}, expected 1")));
        }
        Ok(InitialDistribution {
            weights: weights.into(),
        })
    }

    /// Point mass on state `i` of `n`.
    pub fn dirac(n: usize, i: usize) -> Self {
        InitialDistribution {
            weights: RVector::unit(n, i),
        }
    }

    pub fn weights(&self) -> &RVector {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut w = RVector::zeros(self.len());
        for (i, x) in self.weights.iter().enumerate() {
            w[perm[i]] = x.clone();
        }
        InitialDistribution { weights: w }
    }
}

/// HMM over a finite observation alphabet, one matrix per letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteHMM {
    states: Vec<String>,
    alphabet: Vec<String>,
    matrices: Vec<RMatrix>,
}

impl FiniteHMM {
    /// Checks shapes, non-negativity, and that the letter matrices sum to a
    /// stochastic matrix.
    pub fn new(states: Vec<String>, alphabet: Vec<String>, matrices: Vec<RMatrix>) -> Result<Self> {
        let n = states.len();
        if alphabet.len() != matrices.len() {
            return Err(Error::DimensionMismatch {
                expected: alphabet.len(),
                found: matrices.len(),
            });
        }
        let mut seen = HashSet::new();
        for a in &alphabet {
            if !seen.insert(a) {
                return Err(Error::InvalidFiniteModel(format!("duplicate letter `{a}`")));
            }
        }
        let mut total = RMatrix::zeros(n, n);
        for (a, m) in alphabet.iter().zip(&matrices) {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: if m.rows() != n { m.rows() } else { m.cols() },
                });
            }
            if !m.is_nonnegative() {
                return Err(Error::InvalidFiniteModel(format!("matrix of `{a}` has a negative entry")));
            }
            total = total.add(m);
        }
        if !total.is_stochastic() {
            return Err(Error::InvalidFiniteModel("letter matrices do not sum to a stochastic matrix".into()));
        }
        Ok(FiniteHMM {
            states,
            alphabet,
            matrices,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn matrices(&self) -> &[RMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, letter: usize) -> &RMatrix {
        &self.matrices[letter]
    }

    pub fn letter_index(&self, letter: &str) -> Option<usize> {
        self.alphabet.iter().position(|a| a == letter)
    }

    pub fn total(&self) -> RMatrix {
        let n = self.num_states();
        self.matrices.iter().fold(RMatrix::zeros(n, n), |acc, m| acc.add(m))
    }
}
