use cohmm_core::hmm::InitialDistribution;
use cohmm_core::linalg::{int, rat, Rational};
use cohmm_core::models;
use cohmm_core::random::{random_continuous_hmm, random_distribution, random_profile_pool, random_twin_hmm};
use cohmm_core::check_continuous;
use cohmm_sim::{cylinder_probability, find_separating_cylinder, ObsBox};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 128,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// Tolerance for numeric agreement of equivalent distributions.
const AGREEMENT: f64 = 1e-9;
/// A difference this large counts as separating.
const SEPARATION: f64 = 1e-8;

fn random_box(rng: &mut ChaCha8Rng) -> ObsBox {
    match rng.random_range(0..6) {
        0 => ObsBox::Symbol(["a", "b"][rng.random_range(0..2)].into()),
        1 => ObsBox::whole_line(),
        _ => {
            let lo = rat(rng.random_range(-8..=16), 4);
            let hi = &lo + rat(rng.random_range(1..=12), 4);
            match rng.random_range(0..3) {
                0 => ObsBox::Interval { lo: None, hi: Some(hi) },
                1 => ObsBox::Interval { lo: Some(lo), hi: None },
                _ => ObsBox::interval(lo, hi),
            }
        }
    }
}

/// Cuts partitioning the real line into consecutive half-open pieces.
fn partition(cuts: &[Rational]) -> Vec<ObsBox> {
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut lo = None;
    for c in cuts {
        out.push(ObsBox::Interval { lo: lo.clone(), hi: Some(c.clone()) });
        lo = Some(c.clone());
    }
    out.push(ObsBox::Interval { lo, hi: None });
    out
}

#[test]
fn exp_uniform_negative_unit_box() {
    let h = models::exp_uniform();
    let pi = InitialDistribution::dirac(2, 0);
    let p = cylinder_probability(&h, &pi, &[ObsBox::interval(int(-1), int(0))]);
    assert!((p - 0.5).abs() < 1e-12, "{p}");
    // From q2 nothing lands in [-1, 0).
    let q = cylinder_probability(&h, &InitialDistribution::dirac(2, 1), &[ObsBox::interval(int(-1), int(0))]);
    assert_eq!(q, 0.0);
}

#[test]
fn hand_integrated_two_step_cylinder() {
    // q1 -> q1 on Exp(2) in [0, 1): 1/2 (1 - e^-2); then q1 -> q2 on [-1, 0): 1/2.
    let h = models::exp_uniform();
    let pi = InitialDistribution::dirac(2, 0);
    let p = cylinder_probability(&h, &pi, &[ObsBox::interval(int(0), int(1)), ObsBox::interval(int(-1), int(0))]);
    let expected = 0.5 * (1.0 - (-2.0f64).exp()) * 0.5;
    assert!((p - expected).abs() < 1e-12);
}

#[test]
fn whole_line_has_probability_one() {
    let h = models::gaussian_mixture();
    for i in 0..3 {
        let p = cylinder_probability(&h, &InitialDistribution::dirac(3, i), &[ObsBox::whole_line()]);
        assert!((p - 1.0).abs() < 1e-12);
    }
}

#[test]
fn symbol_boxes_read_point_masses() {
    let h = models::timing((int(2), int(3)), (int(2), int(3)));
    let pi = InitialDistribution::dirac(6, 0);
    let a = cylinder_probability(&h, &pi, &[ObsBox::Symbol("a".into())]);
    assert!((a - 1.0 / 3.0).abs() < 1e-15);
    let ab = cylinder_probability(&h, &pi, &[ObsBox::Symbol("a".into()), ObsBox::interval(rat(3, 2), int(2))]);
    assert!((ab - 1.0 / 6.0).abs() < 1e-15);
}

#[test]
fn counterexample_pair_agrees_on_first_coordinate() {
    let h = models::mixture_counterexample();
    let (q1, q4) = (InitialDistribution::dirac(4, 0), InitialDistribution::dirac(4, 3));
    for k in 0..8 {
        let b = [ObsBox::interval(rat(k, 8), rat(k + 1, 8))];
        let d = cylinder_probability(&h, &q1, &b) - cylinder_probability(&h, &q4, &b);
        assert!(d.abs() < AGREEMENT);
    }
}

#[test]
fn separation_found_for_two_state_model() {
    let h = models::two_state_uniforms();
    let (pi1, pi2) = (InitialDistribution::dirac(2, 0), InitialDistribution::dirac(2, 1));
    let (boxes, diff) = find_separating_cylinder(&h, &pi1, &pi2, 1, SEPARATION).unwrap();
    assert_eq!(boxes.len(), 1);
    assert!(diff > SEPARATION);
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn partition_of_the_line_sums_to_one(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = random_profile_pool(&mut rng, 5, 3, &["a", "b"]);
        let n = rng.random_range(1..=4);
        let h = random_continuous_hmm(&mut rng, n, &pool, 1, 3);
        let pi = random_distribution(&mut rng, n);
        let mut cuts: Vec<Rational> = (0..rng.random_range(0..8)).map(|_| rat(rng.random_range(-40..=40), 8)).collect();
        cuts.sort();
        cuts.dedup();
        let mut pieces = partition(&cuts);
        pieces.push(ObsBox::Symbol("a".into()));
        pieces.push(ObsBox::Symbol("b".into()));
        let total: f64 = pieces.iter().map(|b| cylinder_probability(&h, &pi, std::slice::from_ref(b))).sum();
        prop_assert!((total - 1.0).abs() <= 1e-9, "total {}", total);
    }

    #[test]
    fn equivalent_states_agree_on_every_box(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=3);
        let (h, s, t) = random_twin_hmm(&mut rng, n);
        let (pi1, pi2) = (InitialDistribution::dirac(2 * n, s), InitialDistribution::dirac(2 * n, t));
        prop_assert!(check_continuous(&h, &pi1, &pi2).unwrap().equivalent);
        for _ in 0..20 {
            let boxes: Vec<ObsBox> = (0..rng.random_range(1..=4)).map(|_| random_box(&mut rng)).collect();
            let d = cylinder_probability(&h, &pi1, &boxes) - cylinder_probability(&h, &pi2, &boxes);
            prop_assert!(d.abs() <= AGREEMENT, "difference {} on {:?}", d, boxes);
        }
    }

    #[test]
    fn non_equivalent_verdicts_have_separating_boxes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = random_profile_pool(&mut rng, 4, 3, &["a"]);
        let n = rng.random_range(2..=3);
        let h = random_continuous_hmm(&mut rng, n, &pool, 1, 2);
        let (pi1, pi2) = (random_distribution(&mut rng, n), random_distribution(&mut rng, n));
        let verdict = check_continuous(&h, &pi1, &pi2).unwrap();
        prop_assume!(!verdict.equivalent);
        let len = verdict.witness.as_ref().map_or(1, |w| w.word.len().max(1));
        let found = find_separating_cylinder(&h, &pi1, &pi2, len, SEPARATION);
        prop_assert!(found.is_some(), "no separating cylinder up to length {}", len);
    }
}
