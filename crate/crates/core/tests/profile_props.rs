use cohmm_core::linalg::{int, rat, RVector, Rational};
use cohmm_core::profile::{
    alternant_probe, canonicalize, evaluate_numeric, linear_decompose, nonnegativity_lint, parse_profile,
    refine_atoms, total_mass, Atom, Independence, ProfileExpr,
};
use cohmm_core::random::{random_base_density, random_profile_pool, random_simplex};
use num_traits::{ToPrimitive, Zero};
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

fn p(text: &str) -> ProfileExpr {
    parse_profile(text).unwrap()
}

/// A profile with arbitrary (possibly negative) rational weights.
fn random_signed_profile(rng: &mut ChaCha8Rng) -> ProfileExpr {
    let terms = rng.random_range(1..=4);
    let mut out = ProfileExpr::new(Vec::new());
    for _ in 0..terms {
        let c = rat(rng.random_range(-5..=5), rng.random_range(1..=3));
        out = out.add(&random_base_density(rng, &["a", "b"]).scale(&c));
    }
    out
}

fn random_point(rng: &mut ChaCha8Rng) -> f64 {
    // Mostly near the action, sometimes on an exact grid point.
    if rng.random_bool(0.2) {
        rng.random_range(-16..=24) as f64 / 4.0
    } else {
        rng.random_range(-8.0..10.0)
    }
}

#[test]
fn total_mass_examples() {
    assert_eq!(total_mass(&p("2*Mono(1,0,1)")), int(1));
    assert_eq!(total_mass(&p("N(0,1)")), int(1));
    assert_eq!(total_mass(&p("1/2*Mono(0,0,2)")), int(1));
    assert_eq!(total_mass(&p("U(0,2)")), int(1));
}

#[test]
fn evaluate_examples() {
    assert_eq!(evaluate_numeric(&p("2*Mono(1,0,1)"), 0.5), 1.0);
    assert_eq!(evaluate_numeric(&p("Exp(2)"), 0.0), 2.0);
    let reference = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    assert!((evaluate_numeric(&p("N(0,1)"), 0.0) - reference).abs() < 1e-15);
    assert!((reference - 0.398_942_280_401_432_7).abs() < 1e-15);
}

#[test]
fn refinement_reconstructs_nested_intervals_pointwise() {
    let ps = vec![p("Mono(0,0,3)"), p("Mono(0,1,2)")];
    let (basis, coords) = refine_atoms(&ps);
    assert_eq!(basis.len(), 3);
    assert_eq!(coords[0], RVector::from(vec![int(1), int(1), int(1)]));
    assert_eq!(coords[1], RVector::from(vec![int(0), int(1), int(0)]));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let x = rng.random_range(-1.0..4.0);
        for (q, c) in ps.iter().zip(&coords) {
            assert!((basis.profile(c).evaluate_numeric(x) - q.evaluate_numeric(x)).abs() < 1e-12);
        }
    }
}

#[test]
fn lint_accepts_hypoexponential() {
    assert!(nonnegativity_lint(&p("2*Exp(1) - Exp(2)"), 10_000).is_empty());
    assert!(!nonnegativity_lint(&p("Mono(0,0,1) - 2*Mono(0,0,1)"), 100).is_empty());
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn refinement_reconstructs_profiles(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ps: Vec<ProfileExpr> = (0..rng.random_range(1..=5)).map(|_| random_signed_profile(&mut rng)).collect();
        let (basis, coords) = refine_atoms(&ps);
        for (q, c) in ps.iter().zip(&coords) {
            prop_assert_eq!(c.len(), basis.len());
            for _ in 0..1000 {
                let x = random_point(&mut rng);
                let rebuilt: f64 = c.iter().zip(basis.atoms()).map(|(k, a)| k.to_f64().unwrap() * a.eval(x)).sum();
                prop_assert!((rebuilt - q.evaluate_numeric(x)).abs() <= 1e-9, "x={} rebuilt={} direct={}", x, rebuilt, q.evaluate_numeric(x));
            }
        }
    }

    #[test]
    fn total_mass_is_linear(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_signed_profile(&mut rng), random_signed_profile(&mut rng));
        let (x, y) = (rat(rng.random_range(-9..=9), rng.random_range(1..=7)), rat(rng.random_range(-9..=9), rng.random_range(1..=7)));
        let combo = ProfileExpr::linear_combination([(&x, &a), (&y, &b)]);
        prop_assert_eq!(total_mass(&combo), &x * total_mass(&a) + &y * total_mass(&b));
    }

    #[test]
    fn decomposition_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = rng.random_range(2..=4);
        let size = base + rng.random_range(0..=4);
        let ps = random_profile_pool(&mut rng, size, base, &["a"]);
        let d = linear_decompose(&ps);
        prop_assert!(!d.basis_indices.is_empty());
        prop_assert!(d.basis_indices.windows(2).all(|w| w[0] < w[1]));
        for (i, v) in d.coordinates.iter().enumerate() {
            let mut rebuilt = RVector::zeros(v.len());
            for (k, &b) in d.basis_indices.iter().enumerate() {
                let c = &d.coefficients[(i, k)];
                for (j, x) in d.coordinates[b].iter().enumerate() {
                    rebuilt[j] += c * x;
                }
            }
            prop_assert_eq!(&rebuilt, v);
        }
        // Basis members express themselves as unit vectors.
        for (k, &b) in d.basis_indices.iter().enumerate() {
            for j in 0..d.basis_indices.len() {
                let expected: Rational = if j == k { int(1) } else { int(0) };
                prop_assert_eq!(&d.coefficients[(b, j)], &expected);
            }
        }
    }

    #[test]
    fn atom_basis_is_independent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ps: Vec<ProfileExpr> = (0..rng.random_range(1..=4)).map(|_| random_signed_profile(&mut rng)).collect();
        let (basis, _) = refine_atoms(&ps);
        let atoms: Vec<ProfileExpr> = basis.atoms().iter().cloned().map(ProfileExpr::atom).collect();
        prop_assert_eq!(alternant_probe(&atoms, 50, seed), Independence::Independent);
    }

    #[test]
    fn canonicalize_is_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms: Vec<(Rational, Atom)> = Vec::new();
        for _ in 0..rng.random_range(0..8) {
            let q = random_signed_profile(&mut rng);
            terms.extend(q.terms().iter().cloned());
            // Split a monomial into touching pieces now and then.
            if let Some((c, Atom::Monomial { degree, lo, hi })) = q.terms().last().cloned() {
                let mid = (&lo + &hi) / int(2);
                terms.push((c.clone(), Atom::monomial(degree, lo, mid.clone()).unwrap()));
                terms.push((c, Atom::monomial(degree, mid, hi).unwrap()));
            }
        }
        let once = canonicalize(terms);
        prop_assert_eq!(canonicalize(once.clone()), once.clone());
        prop_assert!(once.iter().all(|(c, _)| !c.is_zero()));
        prop_assert!(once.windows(2).all(|w| w[0].1 < w[1].1));
    }

    #[test]
    fn convex_mixtures_are_lint_clean(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(1..=4);
        let parts: Vec<ProfileExpr> = (0..k).map(|_| random_base_density(&mut rng, &["a"])).collect();
        let weights = random_simplex(&mut rng, k, 8);
        let mix = ProfileExpr::linear_combination(weights.iter().zip(&parts));
        prop_assert_eq!(total_mass(&mix), int(1));
        prop_assert!(nonnegativity_lint(&mix, 2_000).is_empty());
    }

    #[test]
    fn printed_profiles_reparse(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_signed_profile(&mut rng);
        // The grammar has no spelling for the zero function.
        prop_assume!(!q.is_zero());
        prop_assert_eq!(parse_profile(&q.to_string()).unwrap(), q);
    }
}
