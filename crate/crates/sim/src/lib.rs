//! Monte Carlo oracle for equivalence verdicts.
//!
//! Samples observation traces from a continuous-observation HMM, compares
//! two trace distributions with a chi-square homogeneity test, and
//! computes cylinder-set probabilities numerically.

use std::fmt;

use cohmm_core::Observation;
use thiserror::Error;

pub mod cylinder;
pub mod sampler;
pub mod stats;

pub use cylinder::{cylinder_probability, find_separating_cylinder, ObsBox};
pub use sampler::{sample_trace, sample_traces, trace_rng, DensitySampler, ModelSampler};
pub use stats::{two_sample_check, TwoSampleConfig, TwoSampleReport};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Sampling needs genuine densities.
    #[error("sampling refused: profile is negative somewhere ({0})")]
    NegativeDensity(String),

    #[error(transparent)]
    Model(#[from] cohmm_core::Error),
}

/// A finite prefix of an observation sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub observations: Vec<Observation>,
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, o) in self.observations.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{o}")?;
        }
        Ok(())
    }
}
