//! Numeric independence witness via alternant matrices.
//!
//! For functions `f_1..f_n` and points `x_1..x_n`, the alternant matrix is
//! `A[i][j] = f_j(x_i)`. The functions are independent iff some alternant is
//! non-singular, so a well-conditioned sample certifies independence (up to
//! float error). A singular-looking sample proves nothing, hence the probe
//! never reports dependence.

use nalgebra::DMatrix;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{to_f64, Atom, Observation, ProfileExpr};

/// Smallest-to-largest singular value ratio accepted as non-singular, after
/// each column is scaled to unit max-norm.
const CONDITION_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Independence {
    Independent,
    Undetermined,
}

/// `A[i][j] = profiles[j](points[i])`.
pub fn alternant_matrix(profiles: &[ProfileExpr], points: &[Observation]) -> DMatrix<f64> {
    DMatrix::from_fn(points.len(), profiles.len(), |i, j| profiles[j].evaluate_at(&points[i]))
}

fn is_well_conditioned(mut m: DMatrix<f64>) -> bool {
    for mut col in m.column_iter_mut() {
        let scale = col.amax();
        if scale == 0.0 || !scale.is_finite() {
            return false;
        }
        col /= scale;
    }
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    max > 0.0 && min / max > CONDITION_FLOOR
}

fn sample_point(atom: &Atom, rng: &mut ChaCha8Rng) -> Observation {
    match atom {
        Atom::Gaussian { mu, sigma } => {
            Observation::Real(to_f64(mu) + to_f64(sigma) * rng.random_range(-2.0..2.0))
        }
        Atom::Exponential { lambda } => Observation::Real(rng.random_range(0.0..3.0 / to_f64(lambda))),
        Atom::Monomial { lo, hi, .. } => Observation::Real(rng.random_range(to_f64(lo)..to_f64(hi))),
        Atom::Discrete { symbol } => Observation::Symbol(symbol.clone()),
    }
}

/// Runs `trials` random alternants. Each trial draws one point per profile,
/// from the support of a randomly chosen term of that profile.
pub fn alternant_probe(profiles: &[ProfileExpr], trials: usize, rng_seed: u64) -> Independence {
    if profiles.is_empty() {
        return Independence::Independent;
    }
    if profiles.iter().any(ProfileExpr::is_zero) {
        return Independence::Undetermined;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..trials.max(1) {
        let points: Vec<Observation> = profiles
            .iter()
            .map(|p| {
                let (_, atom) = p.terms().choose(&mut rng).expect("non-zero profile");
                sample_point(atom, &mut rng)
            })
            .collect();
        if is_well_conditioned(alternant_matrix(profiles, &points)) {
            return Independence::Independent;
        }
    }
    Independence::Undetermined
}
