//! Numeric probabilities of cylinder sets `B1 x ... x Bn x Sigma^omega`.

use std::collections::BTreeSet;
use std::fmt;

use cohmm_core::hmm::{ContinuousHMM, InitialDistribution};
use cohmm_core::linalg::{int, Rational};
use cohmm_core::profile::{Atom, ProfileExpr};
use num_traits::Pow;

use crate::sampler::{f, Component};

/// One coordinate of a cylinder: a half-open interval `[lo, hi)` of the
/// real line (unbounded where `None`) or a single discrete symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObsBox {
    Interval { lo: Option<Rational>, hi: Option<Rational> },
    Symbol(String),
}

impl ObsBox {
    pub fn whole_line() -> ObsBox {
        ObsBox::Interval { lo: None, hi: None }
    }

    pub fn interval(lo: Rational, hi: Rational) -> ObsBox {
        ObsBox::Interval { lo: Some(lo), hi: Some(hi) }
    }

    pub fn below(hi: Rational) -> ObsBox {
        ObsBox::Interval { lo: None, hi: Some(hi) }
    }
}

impl fmt::Display for ObsBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObsBox::Interval { lo, hi } => {
                match lo {
                    Some(x) => write!(f, "[{x}, ")?,
                    None => f.write_str("(-inf, ")?,
                }
                match hi {
                    Some(x) => write!(f, "{x})"),
                    None => f.write_str("inf)"),
                }
            }
            ObsBox::Symbol(s) => write!(f, "{{{s}}}"),
        }
    }
}

/// Exact `integral_{[a, b) cap [lo, hi)} x^k dx`.
fn monomial_integral(k: u32, lo: &Rational, hi: &Rational, a: Option<&Rational>, b: Option<&Rational>) -> Rational {
    let a = a.map_or(lo.clone(), |a| a.clone().max(lo.clone()));
    let b = b.map_or(hi.clone(), |b| b.clone().min(hi.clone()));
    if a >= b {
        return int(0);
    }
    let e = k + 1;
    (Pow::pow(&b, e) - Pow::pow(&a, e)) / int(e as i64)
}

fn atom_integral(atom: &Atom, bx: &ObsBox) -> f64 {
    match (atom, bx) {
        (Atom::Discrete { symbol }, ObsBox::Symbol(s)) => (symbol == s) as u8 as f64,
        (Atom::Discrete { .. }, _) | (_, ObsBox::Symbol(_)) => 0.0,
        (Atom::Monomial { degree, lo, hi }, ObsBox::Interval { lo: a, hi: b }) => {
            f(&monomial_integral(*degree, lo, hi, a.as_ref(), b.as_ref()))
        }
        (_, ObsBox::Interval { lo: a, hi: b }) => {
            let c = Component::from_atom(atom).expect("continuous atom");
            let upper = b.as_ref().map_or(1.0, |b| c.antiderivative(f(b)));
            let lower = a.as_ref().map_or(0.0, |a| c.antiderivative(f(a)));
            (upper - lower).max(0.0)
        }
    }
}

fn profile_integral(p: &ProfileExpr, bx: &ObsBox) -> f64 {
    p.terms().iter().map(|(c, a)| f(c) * atom_integral(a, bx)).sum()
}

/// `M(B)[i][j] = prob_ij * integral_B psi_ij`.
fn box_matrix(h: &ContinuousHMM, bx: &ObsBox) -> Vec<Vec<f64>> {
    let n = h.num_states();
    let mut m = vec![vec![0.0; n]; n];
    for (i, j, t) in h.transitions() {
        m[i][j] = f(&t.prob) * profile_integral(&t.profile, bx);
    }
    m
}

fn step(alpha: &[f64], m: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; alpha.len()];
    for (a, row) in alpha.iter().zip(m) {
        if *a != 0.0 {
            for (o, x) in out.iter_mut().zip(row) {
                *o += a * x;
            }
        }
    }
    out
}

fn start(pi: &InitialDistribution) -> Vec<f64> {
    pi.weights().iter().map(f).collect()
}

/// `pi * M(B1) * ... * M(Bn) * 1`. The model is assumed valid.
pub fn cylinder_probability(h: &ContinuousHMM, pi: &InitialDistribution, boxes: &[ObsBox]) -> f64 {
    boxes
        .iter()
        .fold(start(pi), |alpha, bx| step(&alpha, &box_matrix(h, bx)))
        .iter()
        .sum()
}

/// Half-lines ending at every breakpoint of every atom, the whole line,
/// and every symbol.
fn candidate_boxes(h: &ContinuousHMM) -> Vec<ObsBox> {
    let mut cuts: BTreeSet<Rational> = BTreeSet::new();
    let mut symbols: BTreeSet<String> = BTreeSet::new();
    cuts.insert(int(0));
    for (_, _, t) in h.transitions() {
        for (_, atom) in t.profile.terms() {
            match atom {
                Atom::Gaussian { mu, sigma } => {
                    cuts.extend([mu - sigma, mu.clone(), mu + sigma]);
                }
                Atom::Exponential { lambda } => {
                    cuts.extend([lambda.recip() / int(2), lambda.recip(), int(2) / lambda]);
                }
                Atom::Monomial { lo, hi, .. } => {
                    cuts.extend([lo.clone(), (lo + hi) / int(2), hi.clone()]);
                }
                Atom::Discrete { symbol } => {
                    symbols.insert(symbol.clone());
                }
            }
        }
    }
    let mut out: Vec<ObsBox> = cuts.into_iter().map(ObsBox::below).collect();
    out.push(ObsBox::whole_line());
    out.extend(symbols.into_iter().map(ObsBox::Symbol));
    out
}

/// Searches cylinders of length up to `max_len` built from breakpoint
/// half-lines and symbols for one where the two distributions differ by
/// more than `tolerance`. Returns the shortest found and the difference.
pub fn find_separating_cylinder(
    h: &ContinuousHMM,
    pi1: &InitialDistribution,
    pi2: &InitialDistribution,
    max_len: usize,
    tolerance: f64,
) -> Option<(Vec<ObsBox>, f64)> {
    let boxes = candidate_boxes(h);
    let matrices: Vec<_> = boxes.iter().map(|b| box_matrix(h, b)).collect();
    // Breadth-first over lengths so the shortest separating cylinder wins.
    let mut frontier: Vec<(Vec<usize>, Vec<f64>, Vec<f64>)> = vec![(Vec::new(), start(pi1), start(pi2))];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * boxes.len());
        for (word, a1, a2) in &frontier {
            for (k, m) in matrices.iter().enumerate() {
                let (b1, b2) = (step(a1, m), step(a2, m));
                let diff = (b1.iter().sum::<f64>() - b2.iter().sum::<f64>()).abs();
                let mut w = word.clone();
                w.push(k);
                if diff > tolerance {
                    return Some((w.into_iter().map(|k| boxes[k].clone()).collect(), diff));
                }
                next.push((w, b1, b2));
            }
        }
        frontier = next;
    }
    None
}
