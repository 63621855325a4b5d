//! Numeric non-negativity lint for profiles.
//!
//! Advisory only: global non-negativity of a Gaussian mixture cannot be
//! decided exactly here, so this samples a grid and reports where the value
//! drops below `-LINT_EPSILON`.

use num_traits::Signed;

use super::{to_f64, Atom, ProfileExpr};
use crate::linalg::Rational;

pub const LINT_EPSILON: f64 = 1e-9;
pub const DEFAULT_LINT_GRID: usize = 10_000;

/// Gaussian atoms are scanned over `mu +- GAUSSIAN_REACH * sigma`.
const GAUSSIAN_REACH: f64 = 12.0;
/// Exponential atoms are scanned over `[0, EXP_REACH / lambda)`.
const EXP_REACH: f64 = 40.0;

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// Grid points in `[from, to]` are all below `-LINT_EPSILON`; `worst` is
    /// the most negative sampled value.
    Range { from: f64, to: f64, worst: f64 },
    /// A point mass with negative weight.
    Symbol { symbol: String, mass: Rational },
}

/// Samples `grid` points on every segment between consecutive breakpoints
/// (interval endpoints, and the effective support of every Gaussian and
/// exponential), and collects the negative stretches.
pub fn nonnegativity_lint(p: &ProfileExpr, grid: usize) -> Vec<Violation> {
    let grid = grid.max(1);
    let mut violations = Vec::new();
    let mut breaks: Vec<f64> = Vec::new();
    for (c, atom) in p.terms() {
        match atom {
            Atom::Gaussian { mu, sigma } => {
                let (mu, sigma) = (to_f64(mu), to_f64(sigma));
                breaks.extend([mu - GAUSSIAN_REACH * sigma, mu, mu + GAUSSIAN_REACH * sigma]);
            }
            Atom::Exponential { lambda } => breaks.extend([0.0, EXP_REACH / to_f64(lambda)]),
            Atom::Monomial { lo, hi, .. } => breaks.extend([to_f64(lo), to_f64(hi)]),
            Atom::Discrete { symbol } => {
                if c.is_negative() {
                    violations.push(Violation::Symbol {
                        symbol: symbol.clone(),
                        mass: c.clone(),
                    });
                }
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut open: Option<(f64, f64, f64)> = None;
    let close = |open: &mut Option<(f64, f64, f64)>, out: &mut Vec<Violation>| {
        if let Some((from, to, worst)) = open.take() {
            out.push(Violation::Range { from, to, worst });
        }
    };
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let step = (b - a) / grid as f64;
        for i in 0..grid {
            let x = a + step * i as f64;
            let y = p.evaluate_numeric(x);
            if y < -LINT_EPSILON {
                open = Some(match open {
                    Some((from, _, worst)) => (from, x, worst.min(y)),
                    None => (x, x, y),
                });
            } else {
                close(&mut open, &mut violations);
            }
        }
    }
    close(&mut open, &mut violations);
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::parse_profile;

    #[test]
    fn hypoexponential_density_is_clean() {
        let p = parse_profile("2*Exp(1) - Exp(2)").unwrap();
        // 2e^-x - 2e^-2x
        assert!((p.evaluate_numeric(1.0) - (2.0 * (-1f64).exp() - 2.0 * (-2f64).exp())).abs() < 1e-15);
        assert!(nonnegativity_lint(&p, DEFAULT_LINT_GRID).is_empty());
    }

    #[test]
    fn negative_constant_flagged_on_its_interval() {
        let p = parse_profile("Mono(0,0,1) - 2*Mono(0,0,1)").unwrap();
        let v = nonnegativity_lint(&p, 100);
        assert_eq!(v.len(), 1);
        match v[0] {
            Violation::Range { from, to, worst } => {
                assert_eq!(from, 0.0);
                assert!(to < 1.0 && to > 0.98);
                assert!((worst + 1.0).abs() < 1e-15);
            }
            _ => panic!("expected a range"),
        }
    }

    #[test]
    fn negative_point_mass_flagged() {
        let p = parse_profile("2*Dirac(a) - Dirac(b)").unwrap();
        assert!(matches!(
            nonnegativity_lint(&p, 10).as_slice(),
            [Violation::Symbol { symbol, .. }] if symbol == "b"
        ));
    }

    #[test]
    fn gaussian_difference_negative_in_tails() {
        // The wider component dominates far from the mean.
        let p = parse_profile("2*N(0,1) - N(0,2)").unwrap();
        assert!(!nonnegativity_lint(&p, 1000).is_empty());
    }
}
