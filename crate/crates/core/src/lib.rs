//! Exact trace-equivalence checking for hidden Markov models whose
//! observations are drawn from continuous (and finite) densities.
//!
//! Densities are written as rational linear combinations of Gaussian,
//! exponential, interval-monomial and point-mass atoms. The checker
//! decomposes them over an independent basis, reduces the model to one
//! with finitely many observations, and runs an exact span computation.
//! No floating point is used on the decision path.

pub mod equivalence;
pub mod error;
pub mod hmm;
pub mod linalg;
pub mod models;
pub mod profile;
#[cfg(any(test, feature = "random"))]
pub mod random;

pub use equivalence::{
    check_continuous, check_continuous_detailed, check_continuous_with, check_finite,
    finite_prefix_probability, verify_witness, CheckOptions, EquivalenceVerdict, Method, Witness,
};
pub use error::{Error, Result};
pub use hmm::{
    finite_reduction, functional_decomposition, labelling_reduction, nonneg_reduction, theta,
    validate, validate_with, ContinuousHMM, Diagnostic, FiniteHMM, FunctionalDecomposition,
    InitialDistribution, Reduction, Severity, Transition,
};
pub use linalg::{parse_rational, RMatrix, RVector, Rational};
pub use profile::{parse_profile, Atom, Observation, ProfileExpr};
