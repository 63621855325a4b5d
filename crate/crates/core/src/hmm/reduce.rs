//! Reductions from continuous-observation models to finite ones.
//!
//! * The labelling reduction gives every syntactically distinct profile its
//!   own letter. Equivalence there implies equivalence in the original
//!   model, but not conversely: profiles can be linearly dependent.
//! * An independent functional decomposition `Psi = sum_k beta_k * P_k`
//!   with linearly independent `beta_k` has the same matrix span as `Psi`.
//!   When every `P_k` is non-negative it is itself a finite model; otherwise
//!   the theta-scaled matrices `(P - theta * P_k) / (d - theta)` are, with
//!   the same span.

use num_traits::{One, Signed, Zero};

use super::{ContinuousHMM, FiniteHMM};
use crate::error::{Error, Result};
use crate::linalg::{rank_of, RMatrix, Rational};
use crate::profile::{linear_decompose, refine_atoms, ProfileExpr};

/// A finite model plus, per letter, the profile the letter stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub hmm: FiniteHMM,
    pub letter_profiles: Vec<ProfileExpr>,
}

fn fresh_letters(d: usize) -> Vec<String> {
    (1..=d).map(|k| format!("a{k}")).collect()
}

/// One letter per distinct canonical profile, in row-major order of first
/// appearance.
pub fn labelling_reduction(h: &ContinuousHMM) -> Reduction {
    let n = h.num_states();
    let (profiles, uses) = h.distinct_profiles();
    let mut matrices = vec![RMatrix::zeros(n, n); profiles.len()];
    for (i, j, k) in uses {
        matrices[k][(i, j)] = h.get(i, j).expect("entry is present").prob.clone();
    }
    let hmm = FiniteHMM {
        states: h.states().to_vec(),
        alphabet: fresh_letters(profiles.len()),
        matrices,
    };
    Reduction {
        hmm,
        letter_profiles: profiles,
    }
}

/// `Psi = sum_k basis_profiles[k] * matrices[k]` with linearly independent
/// basis profiles, each of total mass one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalDecomposition {
    states: Vec<String>,
    basis_profiles: Vec<ProfileExpr>,
    matrices: Vec<RMatrix>,
}

impl FunctionalDecomposition {
    /// Checks shapes, unit masses, exact independence of the profiles, and
    /// that the matrices sum to a stochastic matrix.
    pub fn new(
        states: Vec<String>,
        basis_profiles: Vec<ProfileExpr>,
        matrices: Vec<RMatrix>,
    ) -> Result<Self> {
        let n = states.len();
        if basis_profiles.len() != matrices.len() || matrices.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: basis_profiles.len().max(1),
                found: matrices.len(),
            });
        }
        for m in &matrices {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.rows(),
                });
            }
        }
        if let Some(p) = basis_profiles.iter().find(|p| !p.total_mass().is_one()) {
            return Err(Error::InvalidFiniteModel(format!(
                "basis profile `{p}` does not have mass 1"
            )));
        }
        let (_, coords) = refine_atoms(&basis_profiles);
        if rank_of(&coords) != basis_profiles.len() {
            return Err(Error::DependentBasis);
        }
        let fd = FunctionalDecomposition {
            states,
            basis_profiles,
            matrices,
        };
        if !fd.total().is_stochastic() {
            return Err(Error::InvalidFiniteModel(
                "decomposition matrices do not sum to a stochastic matrix".into(),
            ));
        }
        Ok(fd)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn basis_profiles(&self) -> &[ProfileExpr] {
        &self.basis_profiles
    }

    pub fn matrices(&self) -> &[RMatrix] {
        &self.matrices
    }

    /// Number of basis profiles.
    pub fn dimension(&self) -> usize {
        self.matrices.len()
    }

    /// `P = sum_k P_k`.
    pub fn total(&self) -> RMatrix {
        let n = self.states.len();
        self.matrices.iter().fold(RMatrix::zeros(n, n), |acc, m| acc.add(m))
    }
}

/// Independent functional decomposition built from the model's own
/// profiles: a basis is selected greedily from the distinct profiles, and
/// `P_k = sum_i b_{i,k} P'_i` where `P'_i` carries the probabilities of the
/// entries that use profile `i`.
pub fn functional_decomposition(h: &ContinuousHMM) -> FunctionalDecomposition {
    let n = h.num_states();
    let (profiles, uses) = h.distinct_profiles();
    let decomposition = linear_decompose(&profiles);
    let d = decomposition.basis_indices.len();
    let mut matrices = vec![RMatrix::zeros(n, n); d];
    for (i, j, g) in uses {
        let p = &h.get(i, j).expect("entry is present").prob;
        for (k, m) in matrices.iter_mut().enumerate() {
            let b = &decomposition.coefficients[(g, k)];
            if !b.is_zero() {
                m[(i, j)] += b * p;
            }
        }
    }
    FunctionalDecomposition {
        states: h.states().to_vec(),
        basis_profiles: decomposition
            .basis_indices
            .iter()
            .map(|&i| profiles[i].clone())
            .collect(),
        matrices,
    }
}

/// `min(1/2, min positive entry of P / max entry over all P_k)`.
pub fn theta(fd: &FunctionalDecomposition) -> Rational {
    let p = fd.total();
    let min_positive = p
        .entries()
        .filter(|x| x.is_positive())
        .min()
        .expect("a stochastic matrix has a positive entry")
        .clone();
    let max_entry = fd
        .matrices
        .iter()
        .flat_map(RMatrix::entries)
        .max()
        .expect("at least one matrix")
        .clone();
    let half = Rational::new(1.into(), 2.into());
    let ratio = min_positive / max_entry;
    if ratio < half {
        ratio
    } else {
        half
    }
}

/// Letters `a1..ad` with `M(a_k) = (P - theta * P_k) / (d - theta)`.
pub fn finite_reduction(fd: &FunctionalDecomposition) -> Reduction {
    let t = theta(fd);
    let p = fd.total();
    let d = Rational::from_integer(fd.dimension().into());
    let norm = (d - &t).recip();
    let matrices = fd
        .matrices
        .iter()
        .map(|pk| p.sub(&pk.scale(&t)).scale(&norm))
        .collect();
    Reduction {
        hmm: FiniteHMM {
            states: fd.states.clone(),
            alphabet: fresh_letters(fd.dimension()),
            matrices,
        },
        letter_profiles: fd.basis_profiles.clone(),
    }
}

/// Letters `a1..ad` with `M(a_k) = P_k`, if every `P_k` is non-negative.
pub fn nonneg_reduction(fd: &FunctionalDecomposition) -> Option<Reduction> {
    if !fd.matrices.iter().all(RMatrix::is_nonnegative) {
        return None;
    }
    Some(Reduction {
        hmm: FiniteHMM {
            states: fd.states.clone(),
            alphabet: fresh_letters(fd.dimension()),
            matrices: fd.matrices.clone(),
        },
        letter_profiles: fd.basis_profiles.clone(),
    })
}
