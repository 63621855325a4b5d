//! Chi-square two-sample homogeneity test on binned trace prefixes.

use std::collections::{BTreeMap, BTreeSet};

use cohmm_core::hmm::{ContinuousHMM, InitialDistribution};
use cohmm_core::Observation;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::sampler::ModelSampler;
use crate::{Result, Trace};

/// Cells whose pooled count is below this are merged with neighbours.
pub const MIN_CELL_COUNT: u64 = 5;
/// Decorrelates the second sample's seed from the first.
const SECOND_SIDE_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug)]
pub struct TwoSampleConfig {
    /// Prefix length `n`.
    pub length: usize,
    /// Traces drawn from each side.
    pub samples: usize,
    /// Equal-frequency buckets per real coordinate.
    pub bins: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for TwoSampleConfig {
    fn default() -> Self {
        TwoSampleConfig {
            length: 2,
            samples: 100_000,
            bins: 4,
            alpha: 0.01,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoSampleReport {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    /// Number of cells after merging.
    pub cells: usize,
    /// No rejection at `alpha`.
    pub passed: bool,
}

/// Per-coordinate bucketing: quantile cuts over pooled reals, then one
/// bucket per symbol after the real buckets.
struct Binner {
    cuts: Vec<Vec<f64>>,
    symbols: Vec<Vec<String>>,
}

impl Binner {
    fn new(samples: &[&[Trace]], length: usize, bins: usize) -> Binner {
        let mut cuts = Vec::with_capacity(length);
        let mut symbols = Vec::with_capacity(length);
        for t in 0..length {
            let mut reals = Vec::new();
            let mut syms = BTreeSet::new();
            for trace in samples.iter().flat_map(|s| s.iter()) {
                match &trace.observations[t] {
                    Observation::Real(x) => reals.push(*x),
                    Observation::Symbol(s) => {
                        syms.insert(s.clone());
                    }
                }
            }
            reals.sort_by(f64::total_cmp);
            let mut c: Vec<f64> = if reals.is_empty() {
                Vec::new()
            } else {
                (1..bins).map(|k| reals[k * reals.len() / bins]).collect()
            };
            c.dedup();
            cuts.push(c);
            symbols.push(syms.into_iter().collect());
        }
        Binner { cuts, symbols }
    }

    fn cell(&self, trace: &Trace) -> Vec<usize> {
        trace
            .observations
            .iter()
            .enumerate()
            .map(|(t, o)| match o {
                Observation::Real(x) => self.cuts[t].partition_point(|c| c <= x),
                Observation::Symbol(s) => {
                    self.cuts[t].len() + 1 + self.symbols[t].binary_search(s).expect("symbol seen while binning")
                }
            })
            .collect()
    }
}

/// Chi-square homogeneity test for a 2 x K table given as column pairs.
fn homogeneity(columns: &[(u64, u64)]) -> (f64, usize, f64) {
    let n1: u64 = columns.iter().map(|c| c.0).sum();
    let n2: u64 = columns.iter().map(|c| c.1).sum();
    let n = (n1 + n2) as f64;
    if columns.len() < 2 || n1 == 0 || n2 == 0 {
        return (0.0, 0, 1.0);
    }
    let mut stat = 0.0;
    for &(a, b) in columns {
        let col = (a + b) as f64;
        let e1 = col * n1 as f64 / n;
        let e2 = col * n2 as f64 / n;
        stat += (a as f64 - e1).powi(2) / e1 + (b as f64 - e2).powi(2) / e2;
    }
    let dof = columns.len() - 1;
    let p = ChiSquared::new(dof as f64).expect("positive dof").sf(stat);
    (stat, dof, p)
}

/// Merges consecutive cells until each has at least [`MIN_CELL_COUNT`]
/// pooled observations.
fn merge_sparse(counts: BTreeMap<Vec<usize>, (u64, u64)>) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::new();
    let mut pending = (0, 0);
    for (_, (a, b)) in counts {
        pending = (pending.0 + a, pending.1 + b);
        if pending.0 + pending.1 >= MIN_CELL_COUNT {
            out.push(pending);
            pending = (0, 0);
        }
    }
    if pending.0 + pending.1 > 0 {
        match out.last_mut() {
            Some(last) => *last = (last.0 + pending.0, last.1 + pending.1),
            None => out.push(pending),
        }
    }
    out
}

/// Compares the length-`n` prefix distributions of `pi1` and `pi2`.
pub fn two_sample_check(
    h: &ContinuousHMM,
    pi1: &InitialDistribution,
    pi2: &InitialDistribution,
    config: &TwoSampleConfig,
) -> Result<TwoSampleReport> {
    let sampler = ModelSampler::new(h)?;
    for pi in [pi1, pi2] {
        if pi.len() != h.num_states() {
            return Err(cohmm_core::Error::DimensionMismatch {
                expected: h.num_states(),
                found: pi.len(),
            }
            .into());
        }
    }
    let first = sampler.traces(pi1, config.length, config.samples, config.seed);
    let second = sampler.traces(pi2, config.length, config.samples, config.seed ^ SECOND_SIDE_SALT);
    let binner = Binner::new(&[&first, &second], config.length, config.bins.max(1));
    let mut counts: BTreeMap<Vec<usize>, (u64, u64)> = BTreeMap::new();
    for t in &first {
        counts.entry(binner.cell(t)).or_default().0 += 1;
    }
    for t in &second {
        counts.entry(binner.cell(t)).or_default().1 += 1;
    }
    let columns = merge_sparse(counts);
    let (statistic, degrees_of_freedom, p_value) = homogeneity(&columns);
    Ok(TwoSampleReport {
        statistic,
        degrees_of_freedom,
        p_value,
        cells: columns.len(),
        passed: p_value >= config.alpha,
    })
}
