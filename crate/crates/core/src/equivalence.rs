//! Trace equivalence of initial distributions.
//!
//! Over a finite alphabet, `pi1` and `pi2` are equivalent iff `pi1 - pi2` is
//! orthogonal to `span{ M(w) * 1 }`. The span is built breadth first by
//! [`span_closure`], so a violated basis vector comes with a shortest word
//! that distinguishes the two distributions.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hmm::{
    finite_reduction, functional_decomposition, labelling_reduction, nonneg_reduction, validate_with,
    ContinuousHMM, Diagnostic, FiniteHMM, InitialDistribution, Reduction,
};
use crate::linalg::{span_closure, RVector, Rational};

/// Which finite model decided the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// One letter per distinct profile; only ever used to prove equivalence.
    Labelling,
    /// The functional decomposition matrices, all non-negative.
    Nonneg,
    /// The theta-scaled matrices.
    Theta,
    /// A finite model checked as given.
    Direct,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Labelling => "labelling",
            Method::Nonneg => "nonneg",
            Method::Theta => "theta",
            Method::Direct => "direct",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A word with `(pi1 - pi2) * M(w) * 1 = value != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub word: Vec<String>,
    /// Letter indices of `word` in the alphabet of the deciding model.
    pub letters: Vec<usize>,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    pub witness: Option<Witness>,
    /// Dimension of `span{ M(w) * 1 }` in the deciding model.
    pub basis_dimension: usize,
    pub method: Method,
    /// Profile each letter of the deciding model stands for; empty for
    /// [`Method::Direct`].
    pub letter_profiles: Vec<crate::profile::ProfileExpr>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    /// Try the labelling reduction first and stop if it proves equivalence.
    pub fast_path: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { fast_path: true }
    }
}

fn check_lengths(n: usize, pis: [&InitialDistribution; 2]) -> Result<()> {
    for pi in pis {
        if pi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: pi.len(),
            });
        }
    }
    Ok(())
}

fn kernel(f: &FiniteHMM, pi1: &InitialDistribution, pi2: &InitialDistribution, method: Method) -> Result<EquivalenceVerdict> {
    check_lengths(f.num_states(), [pi1, pi2])?;
    let diff = pi1.weights().sub(pi2.weights());
    let basis = span_closure(&RVector::ones(f.num_states()), f.matrices())?;
    let witness = basis
        .vectors
        .iter()
        .zip(&basis.words)
        .map(|(v, w)| (diff.dot(v), w))
        .find(|(value, _)| !value.is_zero())
        .map(|(value, letters)| Witness {
            word: letters.iter().map(|&a| f.alphabet()[a].clone()).collect(),
            letters: letters.clone(),
            value,
        });
    Ok(EquivalenceVerdict {
        equivalent: witness.is_none(),
        witness,
        basis_dimension: basis.len(),
        method,
        letter_profiles: Vec::new(),
    })
}

/// Decides `pi1 == pi2` on a finite-observation model.
pub fn check_finite(f: &FiniteHMM, pi1: &InitialDistribution, pi2: &InitialDistribution) -> Result<EquivalenceVerdict> {
    kernel(f, pi1, pi2, Method::Direct)
}

fn check_reduction(r: &Reduction, pi1: &InitialDistribution, pi2: &InitialDistribution, method: Method) -> Result<EquivalenceVerdict> {
    let mut v = kernel(&r.hmm, pi1, pi2, method)?;
    v.letter_profiles = r.letter_profiles.clone();
    Ok(v)
}

/// Decides `pi1 == pi2` on a continuous-observation model with default
/// options.
pub fn check_continuous(h: &ContinuousHMM, pi1: &InitialDistribution, pi2: &InitialDistribution) -> Result<EquivalenceVerdict> {
    check_continuous_with(h, pi1, pi2, CheckOptions::default())
}

pub fn check_continuous_with(
    h: &ContinuousHMM,
    pi1: &InitialDistribution,
    pi2: &InitialDistribution,
    options: CheckOptions,
) -> Result<EquivalenceVerdict> {
    check_continuous_detailed(h, pi1, pi2, options).map(|(v, _)| v)
}

/// Like [`check_continuous_with`], also returning the finite model that
/// decided the verdict.
pub fn check_continuous_detailed(
    h: &ContinuousHMM,
    pi1: &InitialDistribution,
    pi2: &InitialDistribution,
    options: CheckOptions,
) -> Result<(EquivalenceVerdict, Reduction)> {
    let errors: Vec<Diagnostic> = validate_with(h, None).into_iter().filter(Diagnostic::is_error).collect();
    if !errors.is_empty() {
        return Err(Error::InvalidModel(errors));
    }
    check_lengths(h.num_states(), [pi1, pi2])?;

    if options.fast_path {
        let labelled = labelling_reduction(h);
        let v = check_reduction(&labelled, pi1, pi2, Method::Labelling)?;
        if v.equivalent {
            return Ok((v, labelled));
        }
    }
    let fd = functional_decomposition(h);
    let (reduction, method) = match nonneg_reduction(&fd) {
        Some(r) => (r, Method::Nonneg),
        None => (finite_reduction(&fd), Method::Theta),
    };
    let v = check_reduction(&reduction, pi1, pi2, method)?;
    Ok((v, reduction))
}

fn letter_indices<S: AsRef<str>>(f: &FiniteHMM, word: &[S]) -> Result<Vec<usize>> {
    word.iter()
        .map(|a| f.letter_index(a.as_ref()).ok_or_else(|| Error::UnknownLetter(a.as_ref().to_string())))
        .collect()
}

/// `pi * M(w_1) * ... * M(w_n) * 1`, exactly.
pub fn finite_prefix_probability<S: AsRef<str>>(f: &FiniteHMM, pi: &InitialDistribution, word: &[S]) -> Result<Rational> {
    if pi.len() != f.num_states() {
        return Err(Error::DimensionMismatch {
            expected: f.num_states(),
            found: pi.len(),
        });
    }
    let letters = letter_indices(f, word)?;
    let row = letters
        .iter()
        .fold(pi.weights().clone(), |row, &a| row.mul_mat(f.matrix(a)));
    Ok(row.iter().fold(Rational::zero(), |acc, x| acc + x))
}

/// `P_pi1(w) - P_pi2(w)`.
pub fn verify_witness<S: AsRef<str>>(
    f: &FiniteHMM,
    pi1: &InitialDistribution,
    pi2: &InitialDistribution,
    word: &[S],
) -> Result<Rational> {
    Ok(finite_prefix_probability(f, pi1, word)? - finite_prefix_probability(f, pi2, word)?)
}
