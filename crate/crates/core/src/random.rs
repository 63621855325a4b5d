//! Random instance generators for tests and benchmarks.
//!
//! Every probability has a small denominator so exact arithmetic stays
//! cheap; every generated model is valid by construction.

use std::collections::HashSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::hmm::{ContinuousHMM, FiniteHMM, InitialDistribution};
use crate::linalg::{int, rat, RMatrix, Rational};
use crate::profile::{Atom, ProfileExpr};

/// Splits one into `parts` positive rationals with denominator `den`
/// (`den >= parts`).
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, parts: usize, den: i64) -> Vec<Rational> {
    assert!(parts >= 1 && den >= parts as i64);
    let mut units = vec![1i64; parts];
    for _ in 0..(den - parts as i64) {
        units[rng.random_range(0..parts)] += 1;
    }
    units.into_iter().map(|u| rat(u, den)).collect()
}

/// Like [`random_simplex`] but allows zero parts.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, parts: usize, den: i64) -> Vec<Rational> {
    let mut units = vec![0i64; parts];
    for _ in 0..den {
        units[rng.random_range(0..parts)] += 1;
    }
    units.into_iter().map(|u| rat(u, den)).collect()
}

pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, n: usize) -> InitialDistribution {
    InitialDistribution::new(random_weights(rng, n, 6)).expect("weights sum to one")
}

/// A finite model whose entries have denominator at most `den * den`; a
/// random fraction of entries is structurally zero.
pub fn random_finite_hmm<R: Rng + ?Sized>(rng: &mut R, n: usize, letters: usize, den: i64) -> FiniteHMM {
    let mut matrices = vec![RMatrix::zeros(n, n); letters];
    for i in 0..n {
        let row = random_weights(rng, n, den);
        for (j, p) in row.into_iter().enumerate() {
            let split = random_weights(rng, letters, den);
            for (m, s) in matrices.iter_mut().zip(split) {
                m[(i, j)] = &p * s;
            }
        }
    }
    FiniteHMM::new(
        (0..n).map(|i| format!("q{i}")).collect(),
        (0..letters).map(|a| format!("{}", (b'a' + a as u8) as char)).collect(),
        matrices,
    )
    .expect("valid by construction")
}

fn small<R: Rng + ?Sized>(rng: &mut R, lo: i64, hi: i64, den: i64) -> Rational {
    rat(rng.random_range(lo * den..=hi * den), den)
}

/// One of: Gaussian, exponential, uniform, normalised monomial on a positive
/// interval, point mass.
pub fn random_base_density<R: Rng + ?Sized>(rng: &mut R, symbols: &[&str]) -> ProfileExpr {
    let kinds = if symbols.is_empty() { 4 } else { 5 };
    match rng.random_range(0..kinds) {
        0 => {
            let mu = small(rng, -5, 5, 4);
            let sigma = rat(rng.random_range(1..=12), 4);
            ProfileExpr::atom(Atom::gaussian(mu, sigma).expect("sigma > 0"))
        }
        1 => ProfileExpr::atom(Atom::exponential(rat(rng.random_range(1..=16), 4)).expect("rate > 0")),
        2 => {
            let lo = small(rng, -4, 4, 4);
            let hi = &lo + rat(rng.random_range(1..=12), 4);
            ProfileExpr::uniform(lo, hi).expect("lo < hi")
        }
        3 => {
            let degree = rng.random_range(1..=3);
            let lo = small(rng, 0, 3, 2);
            let hi = &lo + rat(rng.random_range(1..=4), 2);
            let atom = Atom::monomial(degree, lo, hi).expect("lo < hi");
            let norm = atom.mass().recip();
            ProfileExpr::new(vec![(norm, atom)])
        }
        _ => ProfileExpr::atom(Atom::discrete(*symbols.choose(rng).expect("non-empty")).expect("identifier")),
    }
}

/// `base` independent-looking base densities followed by convex
/// combinations of two or three of them, all pairwise distinct. Needs
/// `base >= 2` whenever `size > base`.
pub fn random_profile_pool<R: Rng + ?Sized>(rng: &mut R, size: usize, base: usize, symbols: &[&str]) -> Vec<ProfileExpr> {
    let mut seen = HashSet::new();
    let mut pool = Vec::with_capacity(size);
    while pool.len() < base.min(size) {
        let p = random_base_density(rng, symbols);
        if seen.insert(p.clone()) {
            pool.push(p);
        }
    }
    let bases = pool.clone();
    assert!(size <= base || bases.len() >= 2, "mixtures need at least two base densities");
    while pool.len() < size {
        let k = rng.random_range(2..=3).min(bases.len());
        let parts: Vec<&ProfileExpr> = bases.choose_multiple(rng, k).collect();
        let weights = random_simplex(rng, k, 6);
        let p = ProfileExpr::linear_combination(weights.iter().zip(parts));
        if seen.insert(p.clone()) {
            pool.push(p);
        }
    }
    pool
}

/// Every state gets between `min_out` and `max_out` successors; profiles are
/// drawn from `pool`, and each pool entry is used at least once when there
/// are enough entries.
pub fn random_continuous_hmm<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    pool: &[ProfileExpr],
    min_out: usize,
    max_out: usize,
) -> ContinuousHMM {
    let mut h = ContinuousHMM::new((0..n).map(|i| format!("s{i}")).collect());
    let mut entries = Vec::new();
    let targets: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let out = rng.random_range(min_out..=max_out).clamp(1, n);
        let den = (out as i64).max(4);
        let probs = random_simplex(rng, out, den);
        for (&j, p) in targets.choose_multiple(rng, out).zip(probs) {
            entries.push((i, j, p));
        }
    }
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.shuffle(rng);
    for (rank, e) in order.into_iter().enumerate() {
        let (i, j, p) = entries[e].clone();
        let profile = if rank < pool.len() {
            pool[rank].clone()
        } else {
            pool.choose(rng).expect("non-empty pool").clone()
        };
        h.set(i, j, p, profile);
    }
    h
}

/// Small models over uniform densities on a few unit-grid intervals, so
/// that profiles often are linearly dependent and equivalences arise.
pub fn random_uniform_hmm<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ContinuousHMM {
    let mut pool = Vec::new();
    for lo in 0..3 {
        for len in 1..=2 {
            pool.push(ProfileExpr::uniform(int(lo), int(lo + len)).expect("lo < hi"));
        }
    }
    let half = rat(1, 2);
    let mixture = ProfileExpr::linear_combination([(&half, &pool[0]), (&half, &pool[4])]);
    pool.push(mixture);
    let mut h = ContinuousHMM::new((0..n).map(|i| format!("s{i}")).collect());
    for i in 0..n {
        let out = rng.random_range(1..=n.min(3));
        let targets: Vec<usize> = (0..n).collect();
        let probs = random_simplex(rng, out, 4);
        for (&j, p) in targets.choose_multiple(rng, out).zip(probs) {
            h.set(i, j, p, pool.choose(rng).expect("non-empty").clone());
        }
    }
    h
}

/// A finite model with a state duplicated: the last state copies the
/// outgoing row of state 0, so the two are equivalent.
pub fn random_finite_hmm_with_twin<R: Rng + ?Sized>(rng: &mut R, n: usize, letters: usize, den: i64) -> FiniteHMM {
    let f = random_finite_hmm(rng, n, letters, den);
    let matrices = f
        .matrices()
        .iter()
        .map(|m| {
            let mut rows = m.to_rows();
            for r in &mut rows {
                r.push(int(0));
            }
            rows.push(rows[0].clone());
            RMatrix::from_rows(rows).expect("square")
        })
        .collect();
    let mut states = f.states().to_vec();
    states.push(format!("q{n}"));
    FiniteHMM::new(states, f.alphabet().to_vec(), matrices).expect("valid by construction")
}

/// A uniform-density model on `n` states plus a shadow copy on `n` more,
/// where the copy of one state splits a width-two uniform edge into its two
/// halves, sent to the original target and to its copy. Returns the model
/// and the two equivalent states; the labelling reduction usually cannot
/// prove their equivalence.
pub fn random_twin_hmm<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (ContinuousHMM, usize, usize) {
    let base = random_uniform_hmm(rng, n);
    let mut names: Vec<String> = base.states().to_vec();
    names.extend(base.states().iter().map(|s| format!("{s}'")));
    let mut h = ContinuousHMM::new(names);
    for (i, j, t) in base.transitions() {
        h.set(i, j, t.prob.clone(), t.profile.clone());
        h.set(i + n, j + n, t.prob.clone(), t.profile.clone());
    }
    let wide: Vec<(usize, usize, Rational, Rational)> = base
        .transitions()
        .filter_map(|(i, j, t)| match t.profile.terms() {
            [(_, Atom::Monomial { degree: 0, lo, hi })] if hi - lo == int(2) => {
                Some((i, j, t.prob.clone(), lo.clone()))
            }
            _ => None,
        })
        .collect();
    let Some((s, j, p, lo)) = wide.choose(rng).cloned() else {
        return (h, 0, n);
    };
    let half = &p / int(2);
    let mid = &lo + int(1);
    let hi = &lo + int(2);
    h.set(s + n, j + n, half.clone(), ProfileExpr::uniform(lo, mid.clone()).expect("lo < hi"));
    h.set(s + n, j, half, ProfileExpr::uniform(mid, hi).expect("lo < hi"));
    (h, s, s + n)
}
