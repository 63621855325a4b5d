use cohmm_core::hmm::{ContinuousHMM, InitialDistribution};
use cohmm_core::linalg::{int, rat};
use cohmm_core::profile::{parse_profile, Observation};
use cohmm_core::random::{random_base_density, random_continuous_hmm, random_distribution, random_profile_pool};
use cohmm_core::models;
use cohmm_sim::{sample_trace, sample_traces, trace_rng, DensitySampler, Error, ModelSampler};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 128,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn reals(text: &str, count: usize, seed: u64) -> Vec<f64> {
    let s = DensitySampler::new(&parse_profile(text).unwrap());
    let mut rng = trace_rng(seed, 0);
    (0..count)
        .map(|_| match s.sample(&mut rng) {
            Observation::Real(x) => x,
            other => panic!("unexpected {other}"),
        })
        .collect()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Pearson goodness-of-fit p-value against equal cell probabilities.
fn uniform_p_value(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let e = n as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    ChiSquared::new((counts.len() - 1) as f64).unwrap().sf(stat)
}

#[test]
fn exponential_mean() {
    let (m, se) = mean_and_se(&reals("Exp(2)", 100_000, 7));
    assert!((m - 0.5).abs() < 3.0 * se, "mean {m}");
}

#[test]
fn uniform_mean() {
    let xs = reals("U(-1,0)", 100_000, 8);
    let (m, se) = mean_and_se(&xs);
    assert!((m + 0.5).abs() < 3.0 * se, "mean {m}");
    assert!(xs.iter().all(|x| (-1.0..0.0).contains(x)));
}

#[test]
fn gaussian_moments() {
    let xs = reals("N(1,2)", 100_000, 9);
    let (m, se) = mean_and_se(&xs);
    assert!((m - 1.0).abs() < 3.0 * se);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64;
    assert!((var - 4.0).abs() < 0.1, "variance {var}");
}

/// Adding an independent `U(0,u)` delay and reducing mod `u` yields a
/// uniform residue whatever the first summand's distribution.
#[test]
fn padded_residue_is_uniform() {
    let mut picker = ChaCha8Rng::seed_from_u64(11);
    for round in 0..6 {
        let x = random_base_density(&mut picker, &[]);
        let halves = picker.random_range(1..=3);
        let u = rat(halves, 2);
        let uf = halves as f64 / 2.0;
        let y = DensitySampler::new(&cohmm_core::ProfileExpr::uniform(int(0), u.clone()).unwrap());
        let xs = DensitySampler::new(&x);
        let bins = 10;
        // One retry with a fresh seed before declaring failure.
        let passed = (0..2).any(|attempt| {
            let mut rng = trace_rng(100 + round, attempt);
            let mut counts = vec![0u64; bins];
            for _ in 0..100_000 {
                let (Observation::Real(a), Observation::Real(b)) = (xs.sample(&mut rng), y.sample(&mut rng)) else {
                    panic!("continuous densities only");
                };
                let r = (a + b).rem_euclid(uf);
                counts[((r / uf * bins as f64) as usize).min(bins - 1)] += 1;
            }
            uniform_p_value(&counts) >= 0.01
        });
        assert!(passed, "residue of {x} + U(0,{u}) not uniform");
    }
}

#[test]
fn negative_profiles_are_refused() {
    let mut h = ContinuousHMM::new(vec!["q".into()]);
    // Unit mass, negative on [1,2).
    h.set(0, 0, int(1), parse_profile("2*Mono(0,0,1) - Mono(0,1,2)").unwrap());
    let err = ModelSampler::new(&h).unwrap_err();
    assert!(matches!(err, Error::NegativeDensity(_)), "{err}");
}

#[test]
fn invalid_models_are_refused() {
    let mut h = ContinuousHMM::new(vec!["q".into()]);
    h.set(0, 0, rat(1, 2), parse_profile("U(0,1)").unwrap());
    assert!(matches!(ModelSampler::new(&h).unwrap_err(), Error::Model(_)));
}

#[test]
fn traces_follow_the_edges() {
    // From q1 the first observation is either Exp(2) (>= 0) or in [-1, 0).
    let h = models::exp_uniform();
    let pi = InitialDistribution::dirac(2, 0);
    let traces = sample_traces(&h, &pi, 1, 20_000, 5).unwrap();
    let negative = traces
        .iter()
        .filter(|t| matches!(t.observations[0], Observation::Real(x) if x < 0.0))
        .count() as f64
        / 20_000.0;
    assert!((negative - 0.5).abs() < 4.0 * (0.25f64 / 20_000.0).sqrt());
}

#[test]
fn trace_display_is_space_separated() {
    let h = models::timing((int(2), int(3)), (int(2), int(3)));
    let t = sample_trace(&h, &InitialDistribution::dirac(6, 0), 4, 3).unwrap();
    let text = t.to_string();
    let parts: Vec<&str> = text.split(' ').collect();
    assert_eq!(parts.len(), 4);
    assert!(parts[0] == "a" || parts[0] == "b");
    assert!(parts[1].parse::<f64>().is_ok());
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn identical_seeds_give_identical_traces(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = random_profile_pool(&mut rng, 4, 3, &["a", "b"]);
        let n = rng.random_range(1..=4);
        let h = random_continuous_hmm(&mut rng, n, &pool, 1, 3);
        let pi = random_distribution(&mut rng, n);
        let t1 = sample_trace(&h, &pi, 6, seed).unwrap();
        let t2 = sample_trace(&h, &pi, 6, seed).unwrap();
        prop_assert_eq!(t1.observations.len(), 6);
        prop_assert_eq!(t1, t2);
    }

    #[test]
    fn parallel_traces_match_sequential(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = random_profile_pool(&mut rng, 3, 2, &["a"]);
        let n = rng.random_range(1..=3);
        let h = random_continuous_hmm(&mut rng, n, &pool, 1, 2);
        let pi = random_distribution(&mut rng, n);
        let sampler = ModelSampler::new(&h).unwrap();
        let parallel = sampler.traces(&pi, 3, 40, seed);
        let sequential: Vec<_> = (0..40).map(|i| sampler.trace(&pi, 3, &mut trace_rng(seed, i))).collect();
        prop_assert_eq!(parallel, sequential);
    }
}
