//! Symbolic observation densities.
//!
//! A [`ProfileExpr`] is a rational linear combination of [`Atom`]s:
//! Gaussian densities, exponential densities, interval-domain monomials
//! `x^k * chi_[lo,hi)` and point masses on a finite side alphabet. The
//! continuous atoms live on the real line; discrete atoms live on a disjoint
//! finite part of the observation space.

mod alternant;
mod basis;
mod lint;
mod parse;

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::Rational;

pub use alternant::{alternant_matrix, alternant_probe, Independence};
pub use basis::{linear_decompose, refine_atoms, AtomBasis, CoordinateVector, LinearDecomposition};
pub use lint::{nonnegativity_lint, Violation, DEFAULT_LINT_GRID, LINT_EPSILON};
pub use parse::parse_profile;

/// A point of the observation space.
#[derive(Clone, Debug, PartialEq)]
pub enum Observation {
    Real(f64),
    Symbol(String),
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observation::Real(x) => write!(f, "{x}"),
            Observation::Symbol(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    /// Normal density with mean `mu` and standard deviation `sigma > 0`.
    Gaussian { mu: Rational, sigma: Rational },
    /// `lambda * exp(-lambda * x)` on `[0, inf)`, `lambda > 0`.
    Exponential { lambda: Rational },
    /// `x^degree` on `[lo, hi)`, `lo < hi`.
    Monomial { degree: u32, lo: Rational, hi: Rational },
    /// Unit point mass on a symbol of the discrete side alphabet.
    Discrete { symbol: String },
}

impl Atom {
    pub fn gaussian(mu: Rational, sigma: Rational) -> Result<Atom> {
        if !sigma.is_positive() {
            return Err(Error::InvalidAtom(format!("N({mu},{sigma}): sigma must be positive")));
        }
        Ok(Atom::Gaussian { mu, sigma })
    }

    pub fn exponential(lambda: Rational) -> Result<Atom> {
        if !lambda.is_positive() {
            return Err(Error::InvalidAtom(format!("Exp({lambda}): rate must be positive")));
        }
        Ok(Atom::Exponential { lambda })
    }

    pub fn monomial(degree: u32, lo: Rational, hi: Rational) -> Result<Atom> {
        if lo >= hi {
            return Err(Error::InvalidAtom(format!(
                "Mono({degree},{lo},{hi}): interval must be non-empty"
            )));
        }
        Ok(Atom::Monomial { degree, lo, hi })
    }

    pub fn discrete(symbol: impl Into<String>) -> Result<Atom> {
        let symbol = symbol.into();
        if !is_identifier(&symbol) {
            return Err(Error::InvalidAtom(format!("`{symbol}` is not a valid symbol")));
        }
        Ok(Atom::Discrete { symbol })
    }

    fn kind_rank(&self) -> u8 {
        match self {
            Atom::Gaussian { .. } => 0,
            Atom::Exponential { .. } => 1,
            Atom::Monomial { .. } => 2,
            Atom::Discrete { .. } => 3,
        }
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self, Atom::Discrete { .. })
    }

    /// Exact integral over the whole observation space.
    pub fn mass(&self) -> Rational {
        match self {
            Atom::Monomial { degree, lo, hi } => {
                let k = (*degree + 1) as usize;
                (pow(hi, k) - pow(lo, k)) / Rational::from_integer((*degree + 1).into())
            }
            _ => Rational::one(),
        }
    }

    /// Value at a real point. Discrete atoms are zero on the real line.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Atom::Gaussian { mu, sigma } => {
                let (mu, sigma) = (to_f64(mu), to_f64(sigma));
                let z = (x - mu) / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
            }
            Atom::Exponential { lambda } => {
                if x < 0.0 {
                    0.0
                } else {
                    let l = to_f64(lambda);
                    l * (-l * x).exp()
                }
            }
            Atom::Monomial { degree, lo, hi } => {
                if x >= to_f64(lo) && x < to_f64(hi) {
                    x.powi(*degree as i32)
                } else {
                    0.0
                }
            }
            Atom::Discrete { .. } => 0.0,
        }
    }

    /// Value at an observation: densities on reals, unit mass on the symbol.
    pub fn eval_at(&self, obs: &Observation) -> f64 {
        match (self, obs) {
            (Atom::Discrete { symbol }, Observation::Symbol(s)) => {
                if symbol == s {
                    1.0
                } else {
                    0.0
                }
            }
            (_, Observation::Symbol(_)) => 0.0,
            (_, Observation::Real(x)) => self.eval(*x),
        }
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        use Atom::*;
        match (self, other) {
            (Gaussian { mu: m1, sigma: s1 }, Gaussian { mu: m2, sigma: s2 }) => {
                (s1, m1).cmp(&(s2, m2))
            }
            // Faster decay first.
            (Exponential { lambda: l1 }, Exponential { lambda: l2 }) => l2.cmp(l1),
            (
                Monomial { degree: d1, lo: a1, hi: b1 },
                Monomial { degree: d2, lo: a2, hi: b2 },
            ) => (a1, d1, b1).cmp(&(a2, d2, b2)),
            (Discrete { symbol: x }, Discrete { symbol: y }) => x.cmp(y),
            _ => self.kind_rank().cmp(&other.kind_rank()),
        }
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Gaussian { mu, sigma } => write!(f, "N({mu},{sigma})"),
            Atom::Exponential { lambda } => write!(f, "Exp({lambda})"),
            Atom::Monomial { degree, lo, hi } => write!(f, "Mono({degree},{lo},{hi})"),
            Atom::Discrete { symbol } => write!(f, "Dirac({symbol})"),
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn pow(r: &Rational, k: usize) -> Rational {
    num_traits::pow(r.clone(), k)
}

/// Canonical form of a list of weighted atoms: sorted by atom, equal atoms
/// merged, zero coefficients dropped, and touching monomials of the same
/// degree and coefficient joined into one interval.
pub fn canonicalize(mut terms: Vec<(Rational, Atom)>) -> Vec<(Rational, Atom)> {
    loop {
        terms.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        let mut merged: Vec<(Rational, Atom)> = Vec::with_capacity(terms.len());
        for (c, atom) in terms {
            match merged.last_mut() {
                Some((acc, last)) if *last == atom => *acc += c,
                _ => merged.push((c, atom)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        terms = merged;
        if !join_touching(&mut terms) {
            return terms;
        }
    }
}

/// Joins the first pair `c*x^k chi_[a,b)`, `c*x^k chi_[b,e)` found; returns
/// whether anything changed.
fn join_touching(terms: &mut Vec<(Rational, Atom)>) -> bool {
    for i in 0..terms.len() {
        let (c1, Atom::Monomial { degree: d1, lo: a, hi: b }) = &terms[i] else {
            continue;
        };
        let found = terms.iter().enumerate().find_map(|(j, (c2, atom))| match atom {
            Atom::Monomial { degree: d2, lo, hi } if j != i && d2 == d1 && lo == b && c2 == c1 => {
                Some((j, hi.clone()))
            }
            _ => None,
        });
        if let Some((j, end)) = found {
            let joined = Atom::Monomial {
                degree: *d1,
                lo: a.clone(),
                hi: end,
            };
            terms[i].1 = joined;
            terms.remove(j);
            return true;
        }
    }
    false
}

/// A rational linear combination of atoms, always kept canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ProfileExpr {
    terms: Vec<(Rational, Atom)>,
}

impl ProfileExpr {
    pub fn new(terms: Vec<(Rational, Atom)>) -> Self {
        ProfileExpr {
            terms: canonicalize(terms),
        }
    }

    pub fn atom(atom: Atom) -> Self {
        Self::new(vec![(Rational::one(), atom)])
    }

    /// Uniform density on `[lo, hi)`.
    pub fn uniform(lo: Rational, hi: Rational) -> Result<Self> {
        let width = &hi - &lo;
        let atom = Atom::monomial(0, lo, hi)?;
        Ok(Self::new(vec![(width.recip(), atom)]))
    }

    pub fn terms(&self) -> &[(Rational, Atom)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.terms.iter().map(|(a, t)| (a * c, t.clone())).collect())
    }

    pub fn add(&self, other: &ProfileExpr) -> Self {
        Self::new(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    /// `sum_i c_i * p_i`.
    pub fn linear_combination<'a>(
        parts: impl IntoIterator<Item = (&'a Rational, &'a ProfileExpr)>,
    ) -> Self {
        let mut terms = Vec::new();
        for (c, p) in parts {
            terms.extend(p.terms.iter().map(|(a, t)| (a * c, t.clone())));
        }
        Self::new(terms)
    }

    /// Exact integral over the whole observation space.
    pub fn total_mass(&self) -> Rational {
        self.terms
            .iter()
            .fold(Rational::zero(), |acc, (c, atom)| acc + c * atom.mass())
    }

    /// Floating-point value at a real point. Never used for decisions.
    pub fn evaluate_numeric(&self, x: f64) -> f64 {
        self.terms.iter().map(|(c, atom)| to_f64(c) * atom.eval(x)).sum()
    }

    pub fn evaluate_at(&self, obs: &Observation) -> f64 {
        self.terms.iter().map(|(c, atom)| to_f64(c) * atom.eval_at(obs)).sum()
    }

    pub fn has_discrete(&self) -> bool {
        self.terms.iter().any(|(_, a)| !a.is_continuous())
    }

    pub fn has_continuous(&self) -> bool {
        self.terms.iter().any(|(_, a)| a.is_continuous())
    }
}

pub fn total_mass(p: &ProfileExpr) -> Rational {
    p.total_mass()
}

pub fn evaluate_numeric(p: &ProfileExpr, x: f64) -> f64 {
    p.evaluate_numeric(x)
}

impl fmt::Display for ProfileExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (c, atom)) in self.terms.iter().enumerate() {
            let magnitude = if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
                c.abs()
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
                c.abs()
            };
            if magnitude.is_one() {
                write!(f, "{atom}")?;
            } else {
                write!(f, "{magnitude}*{atom}")?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for ProfileExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_profile(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, rat};

    fn mono(k: u32, a: i64, b: i64) -> Atom {
        Atom::monomial(k, int(a), int(b)).unwrap()
    }

    #[test]
    fn mass_of_linear_density() {
        let p = ProfileExpr::new(vec![(int(2), mono(1, 0, 1))]);
        assert_eq!(p.total_mass(), int(1));
    }

    #[test]
    fn mass_of_standard_normal() {
        let p = ProfileExpr::atom(Atom::gaussian(int(0), int(1)).unwrap());
        assert_eq!(p.total_mass(), int(1));
    }

    #[test]
    fn mass_of_half_uniform_on_zero_two() {
        let p = ProfileExpr::new(vec![(rat(1, 2), mono(0, 0, 2))]);
        assert_eq!(p.total_mass(), int(1));
    }

    #[test]
    fn mass_of_cubic_on_negative_interval() {
        // integral of x^3 over [-2, 1) = (1 - 16) / 4
        assert_eq!(mono(3, -2, 1).mass(), rat(-15, 4));
    }

    #[test]
    fn invalid_atoms_rejected() {
        assert!(Atom::gaussian(int(0), int(0)).is_err());
        assert!(Atom::exponential(int(-1)).is_err());
        assert!(Atom::monomial(0, int(1), int(1)).is_err());
        assert!(Atom::discrete("1a").is_err());
    }

    #[test]
    fn evaluate_points() {
        let p = ProfileExpr::new(vec![(int(2), mono(1, 0, 1))]);
        assert!((p.evaluate_numeric(0.5) - 1.0).abs() < 1e-15);
        assert_eq!(p.evaluate_numeric(1.0), 0.0);
        let e = ProfileExpr::atom(Atom::exponential(int(2)).unwrap());
        assert!((e.evaluate_numeric(0.0) - 2.0).abs() < 1e-15);
        assert_eq!(e.evaluate_numeric(-0.1), 0.0);
        let g = ProfileExpr::atom(Atom::gaussian(int(0), int(1)).unwrap());
        let expected = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((g.evaluate_numeric(0.0) - expected).abs() < 1e-15);
        assert!((g.evaluate_numeric(0.0) - 0.398_942_280_401_432_7).abs() < 1e-15);
    }

    #[test]
    fn canonical_merges_and_drops() {
        let p = ProfileExpr::new(vec![
            (int(1), mono(0, 0, 1)),
            (int(-2), mono(0, 0, 1)),
            (int(1), mono(0, 0, 1)),
            (int(3), Atom::exponential(int(1)).unwrap()),
        ]);
        assert_eq!(p.terms().len(), 1);
        assert!(matches!(p.terms()[0].1, Atom::Exponential { .. }));
    }

    #[test]
    fn canonical_joins_touching_intervals() {
        let split = ProfileExpr::new(vec![
            (rat(1, 2), mono(0, 1, 2)),
            (rat(1, 2), mono(0, 0, 1)),
        ]);
        assert_eq!(split, ProfileExpr::uniform(int(0), int(2)).unwrap());
        // Different coefficients stay apart.
        let kept = ProfileExpr::new(vec![(rat(1, 3), mono(0, 0, 1)), (rat(2, 3), mono(0, 1, 2))]);
        assert_eq!(kept.terms().len(), 2);
    }

    #[test]
    fn gaussian_order_is_sigma_then_mu() {
        let a = Atom::gaussian(int(5), int(1)).unwrap();
        let b = Atom::gaussian(int(0), int(2)).unwrap();
        let c = Atom::gaussian(int(1), int(2)).unwrap();
        assert!(a < b && b < c);
        let fast = Atom::exponential(int(3)).unwrap();
        let slow = Atom::exponential(int(1)).unwrap();
        assert!(fast < slow);
    }

    #[test]
    fn display_round_trips() {
        let p = ProfileExpr::new(vec![
            (int(2), mono(0, 0, 1)),
            (int(-2), mono(1, 0, 1)),
            (int(1), Atom::gaussian(rat(-1, 2), int(3)).unwrap()),
        ]);
        let text = p.to_string();
        assert_eq!(text, "N(-1/2,3) + 2*Mono(0,0,1) - 2*Mono(1,0,1)");
        assert_eq!(text.parse::<ProfileExpr>().unwrap(), p);
    }
}
