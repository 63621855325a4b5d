//! Coordinates over an independent atom basis and the greedy basis
//! selection built on top of them.
//!
//! Gaussians, exponentials and point masses are pairwise independent as long
//! as their parameters differ. Interval monomials are made independent by
//! cutting every interval at every endpoint that occurs anywhere in the
//! input: on the resulting disjoint pieces, `{x^k chi_I}` is independent for
//! distinct `(k, I)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;

use super::{Atom, ProfileExpr};
use crate::linalg::{EchelonBasis, RMatrix, RVector, Rational};

pub type CoordinateVector = RVector;

/// Ordered list of linearly independent atoms.
///
/// Order: Gaussians by `(sigma, mu)`, exponentials by decreasing rate,
/// monomials by `(interval start, degree)`, point masses by symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomBasis {
    atoms: Vec<Atom>,
}

impl AtomBasis {
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Rebuilds a profile from its coordinates.
    pub fn profile(&self, coords: &[Rational]) -> ProfileExpr {
        ProfileExpr::new(
            coords
                .iter()
                .zip(&self.atoms)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, a)| (c.clone(), a.clone()))
                .collect(),
        )
    }
}

/// Builds the common atom basis of `profiles` and the exact coordinate
/// vector of each profile in it.
pub fn refine_atoms(profiles: &[ProfileExpr]) -> (AtomBasis, Vec<CoordinateVector>) {
    let mut gaussians = BTreeSet::new();
    let mut exponentials = BTreeSet::new();
    let mut symbols = BTreeSet::new();
    let mut degrees = BTreeSet::new();
    // Coverage sweep: +1 at every interval start, -1 at every end.
    let mut sweep: BTreeMap<Rational, i64> = BTreeMap::new();

    for p in profiles {
        for (_, atom) in p.terms() {
            match atom {
                Atom::Gaussian { .. } => {
                    gaussians.insert(atom.clone());
                }
                Atom::Exponential { .. } => {
                    exponentials.insert(atom.clone());
                }
                Atom::Discrete { .. } => {
                    symbols.insert(atom.clone());
                }
                Atom::Monomial { degree, lo, hi } => {
                    degrees.insert(*degree);
                    *sweep.entry(lo.clone()).or_default() += 1;
                    *sweep.entry(hi.clone()).or_default() -= 1;
                }
            }
        }
    }

    let endpoints: Vec<Rational> = sweep.keys().cloned().collect();
    let mut pieces: Vec<(Rational, Rational)> = Vec::new();
    // piece_at[i]: index of the piece starting at endpoints[i], if covered.
    let mut piece_at: Vec<Option<usize>> = vec![None; endpoints.len()];
    let mut depth = 0i64;
    for (i, (point, delta)) in sweep.iter().enumerate() {
        depth += delta;
        if depth > 0 {
            piece_at[i] = Some(pieces.len());
            pieces.push((point.clone(), endpoints[i + 1].clone()));
        }
    }
    let degrees: Vec<u32> = degrees.into_iter().collect();

    let mut atoms: Vec<Atom> = Vec::new();
    atoms.extend(gaussians);
    atoms.extend(exponentials);
    let monomial_base = atoms.len();
    for (lo, hi) in &pieces {
        for &degree in &degrees {
            atoms.push(Atom::Monomial {
                degree,
                lo: lo.clone(),
                hi: hi.clone(),
            });
        }
    }
    atoms.extend(symbols);

    let index: HashMap<&Atom, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let endpoint_index: HashMap<&Rational, usize> =
        endpoints.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let degree_index: HashMap<u32, usize> =
        degrees.iter().enumerate().map(|(i, d)| (*d, i)).collect();

    let coords = profiles
        .iter()
        .map(|p| {
            let mut v = RVector::zeros(atoms.len());
            for (c, atom) in p.terms() {
                match atom {
                    Atom::Monomial { degree, lo, hi } => {
                        let d = degree_index[degree];
                        let mut e = endpoint_index[lo];
                        while &endpoints[e] < hi {
                            let piece = piece_at[e].expect("inside a covered interval");
                            v[monomial_base + piece * degrees.len() + d] += c;
                            e += 1;
                        }
                    }
                    _ => v[index[atom]] += c,
                }
            }
            v
        })
        .collect();

    (AtomBasis { atoms }, coords)
}

/// A basis subset of the input profiles and the coefficients expressing
/// every input in it.
#[derive(Clone, Debug)]
pub struct LinearDecomposition {
    /// Indices into the input, in input order.
    pub basis_indices: Vec<usize>,
    /// Row `i` expresses input `i`: `profiles[i] = sum_k coefficients[i][k] * profiles[basis_indices[k]]`.
    pub coefficients: RMatrix,
    pub atom_basis: AtomBasis,
    pub coordinates: Vec<CoordinateVector>,
}

/// Greedy basis selection in input order: an input joins the basis when its
/// atom coordinates are independent of the ones already chosen.
pub fn linear_decompose(profiles: &[ProfileExpr]) -> LinearDecomposition {
    let (atom_basis, coordinates) = refine_atoms(profiles);
    let mut echelon = EchelonBasis::with_coordinates(atom_basis.len());
    let mut basis_indices = Vec::new();
    for (i, v) in coordinates.iter().enumerate() {
        if echelon.insert(v).expect("coordinate length matches basis") {
            basis_indices.push(i);
        }
    }
    let mut coefficients = RMatrix::zeros(profiles.len(), basis_indices.len());
    for (i, v) in coordinates.iter().enumerate() {
        let c = echelon
            .coordinates(v)
            .expect("coordinate length matches basis")
            .expect("every input lies in the span of the selected basis");
        for (k, x) in c.into_iter().enumerate() {
            coefficients[(i, k)] = x;
        }
    }
    LinearDecomposition {
        basis_indices,
        coefficients,
        atom_basis,
        coordinates,
    }
}
