//! Trace sampling.
//!
//! A profile is split into its point masses and its continuous part. When
//! every continuous term is itself a non-negative function the continuous
//! part is sampled as a mixture; otherwise (e.g. `2*Exp(1) - Exp(2)`) by
//! bisection on the combined antiderivative.

use std::f64::consts::SQRT_2;

use cohmm_core::hmm::{validate_with, ContinuousHMM, InitialDistribution, Severity};
use cohmm_core::profile::{Atom, Observation, ProfileExpr, DEFAULT_LINT_GRID};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use statrs::function::erf::erf;

use crate::{Error, Result, Trace};

/// Bisection stops once the bracket is this narrow.
const BISECTION_TOLERANCE: f64 = 1e-12;
const BISECTION_MAX_STEPS: usize = 200;
/// Numeric brackets reach this many standard deviations, or this many
/// mean lifetimes of an exponential.
const GAUSSIAN_REACH: f64 = 40.0;
const EXP_REACH: f64 = 60.0;

pub(crate) fn f(r: &cohmm_core::Rational) -> f64 {
    r.to_f64().expect("finite rational")
}

#[derive(Clone, Debug)]
pub(crate) enum Component {
    Normal { mu: f64, sigma: f64 },
    Exponential { lambda: f64 },
    Monomial { degree: i32, lo: f64, hi: f64 },
}

impl Component {
    pub(crate) fn from_atom(atom: &Atom) -> Option<Component> {
        match atom {
            Atom::Gaussian { mu, sigma } => Some(Component::Normal { mu: f(mu), sigma: f(sigma) }),
            Atom::Exponential { lambda } => Some(Component::Exponential { lambda: f(lambda) }),
            Atom::Monomial { degree, lo, hi } => Some(Component::Monomial {
                degree: *degree as i32,
                lo: f(lo),
                hi: f(hi),
            }),
            Atom::Discrete { .. } => None,
        }
    }

    /// `integral_{-inf}^{x}` of the atom.
    pub(crate) fn antiderivative(&self, x: f64) -> f64 {
        match *self {
            Component::Normal { mu, sigma } => 0.5 * (1.0 + erf((x - mu) / (sigma * SQRT_2))),
            Component::Exponential { lambda } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-lambda * x).exp_m1()
                }
            }
            Component::Monomial { degree, lo, hi } => {
                let x = x.clamp(lo, hi);
                let k = degree + 1;
                (x.powi(k) - lo.powi(k)) / k as f64
            }
        }
    }

    fn mass(&self) -> f64 {
        match *self {
            Component::Monomial { hi, .. } => self.antiderivative(hi),
            _ => 1.0,
        }
    }

    fn is_nonnegative(&self) -> bool {
        match *self {
            Component::Monomial { degree, lo, .. } => degree % 2 == 0 || lo >= 0.0,
            _ => true,
        }
    }

    fn bracket(&self) -> (f64, f64) {
        match *self {
            Component::Normal { mu, sigma } => (mu - GAUSSIAN_REACH * sigma, mu + GAUSSIAN_REACH * sigma),
            Component::Exponential { lambda } => (0.0, EXP_REACH / lambda),
            Component::Monomial { lo, hi, .. } => (lo, hi),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Component::Normal { mu, sigma } => mu + sigma * rng.sample::<f64, _>(StandardNormal),
            Component::Exponential { lambda } => -(-rng.random::<f64>()).ln_1p() / lambda,
            Component::Monomial { lo, hi, .. } => {
                let target = rng.random::<f64>() * self.mass();
                bisect(|x| self.antiderivative(x), target, lo, hi)
            }
        }
    }
}

/// Smallest `x` in `[lo, hi]` (to tolerance) with `g(x) >= target`, for
/// non-decreasing `g`.
fn bisect(g: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..BISECTION_MAX_STEPS {
        if hi - lo <= BISECTION_TOLERANCE * hi.abs().max(lo.abs()).max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Clone, Debug)]
enum Continuous {
    None,
    Mixture { cumulative: Vec<f64>, components: Vec<Component> },
    Numeric { terms: Vec<(f64, Component)>, mass: f64, lo: f64, hi: f64 },
}

/// Draws observations from one profile, which must be a genuine density.
#[derive(Clone, Debug)]
pub struct DensitySampler {
    /// Cumulative point-mass weights, then the continuous mass on top.
    symbols: Vec<(f64, String)>,
    total: f64,
    continuous: Continuous,
}

impl DensitySampler {
    /// Assumes `p` is non-negative; callers run the lint first.
    pub fn new(p: &ProfileExpr) -> DensitySampler {
        let mut symbols = Vec::new();
        let mut acc = 0.0;
        let mut terms = Vec::new();
        for (c, atom) in p.terms() {
            match Component::from_atom(atom) {
                Some(comp) => terms.push((f(c), comp)),
                None => {
                    let Atom::Discrete { symbol } = atom else { unreachable!() };
                    acc += f(c).max(0.0);
                    symbols.push((acc, symbol.clone()));
                }
            }
        }
        let continuous = if terms.is_empty() {
            Continuous::None
        } else if terms.iter().all(|(c, comp)| *c >= 0.0 && comp.is_nonnegative()) {
            let mut cumulative = Vec::with_capacity(terms.len());
            let mut s = 0.0;
            for (c, comp) in &terms {
                s += c * comp.mass();
                cumulative.push(s);
            }
            Continuous::Mixture {
                cumulative,
                components: terms.into_iter().map(|(_, comp)| comp).collect(),
            }
        } else {
            let (lo, hi) = terms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, comp)| {
                let (a, b) = comp.bracket();
                (lo.min(a), hi.max(b))
            });
            let mass = terms.iter().map(|(c, comp)| c * comp.mass()).sum();
            Continuous::Numeric { terms, mass, lo, hi }
        };
        let continuous_mass = match &continuous {
            Continuous::None => 0.0,
            Continuous::Mixture { cumulative, .. } => *cumulative.last().expect("non-empty"),
            Continuous::Numeric { mass, .. } => *mass,
        };
        DensitySampler {
            symbols,
            total: acc + continuous_mass.max(0.0),
            continuous,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Observation {
        let u = rng.random::<f64>() * self.total;
        if let Some((_, s)) = self.symbols.iter().find(|(c, _)| u < *c) {
            return Observation::Symbol(s.clone());
        }
        match &self.continuous {
            Continuous::None => Observation::Symbol(self.symbols.last().expect("non-empty profile").1.clone()),
            Continuous::Mixture { cumulative, components } => {
                let v = rng.random::<f64>() * cumulative.last().expect("non-empty");
                let k = cumulative.partition_point(|c| *c <= v).min(components.len() - 1);
                Observation::Real(components[k].sample(rng))
            }
            Continuous::Numeric { terms, mass, lo, hi } => {
                let target = rng.random::<f64>() * mass;
                let cdf = |x: f64| terms.iter().map(|(c, comp)| c * comp.antiderivative(x)).sum::<f64>();
                Observation::Real(bisect(cdf, target, *lo, *hi))
            }
        }
    }
}

/// Per-state outgoing edges with cumulative probabilities.
#[derive(Clone, Debug)]
struct Row {
    cumulative: Vec<f64>,
    targets: Vec<usize>,
    samplers: Vec<DensitySampler>,
}

/// A validated model prepared for repeated sampling.
#[derive(Clone, Debug)]
pub struct ModelSampler {
    rows: Vec<Row>,
}

impl ModelSampler {
    /// Fails on validation errors and on profiles the lint reports as
    /// negative somewhere.
    pub fn new(h: &ContinuousHMM) -> Result<ModelSampler> {
        let diagnostics = validate_with(h, Some(DEFAULT_LINT_GRID));
        if let Some(d) = diagnostics.iter().find(|d| d.severity == Severity::Warning) {
            return Err(Error::NegativeDensity(d.message.clone()));
        }
        let errors: Vec<_> = diagnostics.into_iter().filter(|d| d.is_error()).collect();
        if !errors.is_empty() {
            return Err(Error::Model(cohmm_core::Error::InvalidModel(errors)));
        }
        let n = h.num_states();
        let mut rows: Vec<Row> = (0..n)
            .map(|_| Row {
                cumulative: Vec::new(),
                targets: Vec::new(),
                samplers: Vec::new(),
            })
            .collect();
        for (i, j, t) in h.transitions() {
            let row = &mut rows[i];
            let prev = row.cumulative.last().copied().unwrap_or(0.0);
            row.cumulative.push(prev + f(&t.prob));
            row.targets.push(j);
            row.samplers.push(DensitySampler::new(&t.profile));
        }
        Ok(ModelSampler { rows })
    }

    pub fn num_states(&self) -> usize {
        self.rows.len()
    }

    fn pick(cumulative: &[f64], u: f64) -> usize {
        cumulative.partition_point(|c| *c <= u).min(cumulative.len() - 1)
    }

    /// One trace of length `n` starting from `pi`.
    pub fn trace<R: Rng + ?Sized>(&self, pi: &InitialDistribution, n: usize, rng: &mut R) -> Trace {
        let start: Vec<f64> = pi
            .weights()
            .iter()
            .scan(0.0, |acc, w| {
                *acc += f(w);
                Some(*acc)
            })
            .collect();
        let mut state = Self::pick(&start, rng.random::<f64>() * start.last().copied().unwrap_or(1.0));
        let mut observations = Vec::with_capacity(n);
        for _ in 0..n {
            let row = &self.rows[state];
            let total = *row.cumulative.last().expect("validated rows are non-empty");
            let e = Self::pick(&row.cumulative, rng.random::<f64>() * total);
            observations.push(row.samplers[e].sample(rng));
            state = row.targets[e];
        }
        Trace { observations }
    }
}

/// Generator for trace `index` under `seed`; independent of how traces
/// are split across workers.
pub fn trace_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn check_distribution(h: &ContinuousHMM, pi: &InitialDistribution) -> Result<()> {
    if pi.len() != h.num_states() {
        return Err(Error::Model(cohmm_core::Error::DimensionMismatch {
            expected: h.num_states(),
            found: pi.len(),
        }));
    }
    Ok(())
}

/// One trace of length `n`; identical seeds give identical traces.
pub fn sample_trace(h: &ContinuousHMM, pi: &InitialDistribution, n: usize, seed: u64) -> Result<Trace> {
    check_distribution(h, pi)?;
    Ok(ModelSampler::new(h)?.trace(pi, n, &mut trace_rng(seed, 0)))
}

/// `count` traces in parallel; trace `i` uses [`trace_rng`]`(seed, i)`.
pub fn sample_traces(h: &ContinuousHMM, pi: &InitialDistribution, n: usize, count: usize, seed: u64) -> Result<Vec<Trace>> {
    check_distribution(h, pi)?;
    let sampler = ModelSampler::new(h)?;
    Ok(sampler.traces(pi, n, count, seed))
}

impl ModelSampler {
    pub fn traces(&self, pi: &InitialDistribution, n: usize, count: usize, seed: u64) -> Vec<Trace> {
        (0..count as u64)
            .into_par_iter()
            .map(|i| self.trace(pi, n, &mut trace_rng(seed, i)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cohmm_core::profile::parse_profile;

    fn draws(text: &str, count: usize) -> Vec<f64> {
        let s = DensitySampler::new(&parse_profile(text).unwrap());
        let mut rng = trace_rng(42, 0);
        (0..count)
            .map(|_| match s.sample(&mut rng) {
                Observation::Real(x) => x,
                Observation::Symbol(_) => panic!("unexpected symbol"),
            })
            .collect()
    }

    fn mean(xs: &[f64]) -> f64 {
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    #[test]
    fn bisection_finds_square_root() {
        let r = bisect(|x| x * x, 2.0, 0.0, 2.0);
        assert!((r - SQRT_2).abs() < 1e-11);
    }

    #[test]
    fn linear_density_mean() {
        // 2x on [0,1): mean 2/3, variance 1/18.
        let xs = draws("2*Mono(1,0,1)", 100_000);
        let se = (1.0f64 / 18.0 / 1e5).sqrt();
        assert!((mean(&xs) - 2.0 / 3.0).abs() < 4.0 * se);
        assert!(xs.iter().all(|x| (0.0..1.0).contains(x)));
    }

    #[test]
    fn signed_combination_uses_numeric_inverse() {
        // 2e^-x - 2e^-2x: mean 2 - 1/2 = 3/2, variance 1 + 1/4.
        let xs = draws("2*Exp(1) - Exp(2)", 100_000);
        let se = (1.25f64 / 1e5).sqrt();
        assert!((mean(&xs) - 1.5).abs() < 4.0 * se);
        assert!(xs.iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn point_masses_have_their_weights() {
        let s = DensitySampler::new(&parse_profile("1/4*Dirac(a) + 3/4*Dirac(b)").unwrap());
        let mut rng = trace_rng(1, 0);
        let a = (0..40_000)
            .filter(|_| s.sample(&mut rng) == Observation::Symbol("a".into()))
            .count() as f64
            / 40_000.0;
        assert!((a - 0.25).abs() < 4.0 * (0.25f64 * 0.75 / 40_000.0).sqrt());
    }
}
