//! Exact rational linear algebra.
//!
//! Everything here works over arbitrary-precision fractions. There is no
//! floating-point path: ranks, span memberships and coordinates are exact.
//!
//! The span machinery is built around [`EchelonBasis`], an incrementally
//! maintained row-echelon form. Each inserted vector is reduced against the
//! rows already present, so membership tests cost `O(rank * dim)` and never
//! re-factor the whole basis. [`span_closure`] screens candidates with the
//! same elimination over a word-sized prime field first.

use std::collections::VecDeque;
use std::fmt;
use std::ops::{Deref, Index, IndexMut};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `int` or `int/int` (optional leading sign on the numerator only).
///
/// Decimal and exponent notation is rejected so that no float literal can
/// enter the exact pipeline.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = |message: String| Error::Parse { column: 0, message };
    let parse_int = |part: &str, allow_sign: bool| -> Result<BigInt> {
        let digits = if allow_sign {
            part.strip_prefix(['-', '+']).unwrap_or(part)
        } else {
            part
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad(format!("`{text}` is not a rational (expected int or int/int)")));
        }
        part.trim_start_matches('+')
            .parse::<BigInt>()
            .map_err(|e| bad(format!("`{text}`: {e}")))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s, true)?)),
        Some((num, den)) => {
            let num = parse_int(num.trim(), true)?;
            let den = parse_int(den.trim(), false)?;
            if den.is_zero() {
                return Err(bad(format!("`{text}` has a zero denominator")));
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Dense vector of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RVector(Vec<Rational>);

impl RVector {
    pub fn zeros(n: usize) -> Self {
        RVector(vec![Rational::zero(); n])
    }

    pub fn ones(n: usize) -> Self {
        RVector(vec![Rational::one(); n])
    }

    /// Standard basis vector `e_i` of length `n`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = Rational::one();
        v
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &RVector) -> Rational {
        debug_assert_eq!(self.len(), other.len());
        let mut acc = Rational::zero();
        for (a, b) in self.0.iter().zip(&other.0) {
            if !a.is_zero() && !b.is_zero() {
                acc += a * b;
            }
        }
        acc
    }

    pub fn sub(&self, other: &RVector) -> RVector {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    pub fn scale(&self, c: &Rational) -> RVector {
        self.0.iter().map(|a| a * c).collect()
    }

    /// Row vector times matrix.
    pub fn mul_mat(&self, m: &RMatrix) -> RVector {
        debug_assert_eq!(self.len(), m.rows());
        let mut out = vec![Rational::zero(); m.cols()];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in m.row(i).iter().enumerate() {
                if !b.is_zero() {
                    out[j] += a * b;
                }
            }
        }
        RVector(out)
    }
}

impl Deref for RVector {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

impl From<Vec<Rational>> for RVector {
    fn from(v: Vec<Rational>) -> Self {
        RVector(v)
    }
}

impl FromIterator<Rational> for RVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        RVector(iter.into_iter().collect())
    }
}

impl Index<usize> for RVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl IndexMut<usize> for RVector {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.0[i]
    }
}

/// Dense row-major matrix of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(RMatrix {
            rows: n,
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> impl Iterator<Item = &Rational> {
        self.data.iter()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Matrix times column vector. Zero entries are skipped, which matters
    /// for the sparse-ish transition matrices the reductions produce.
    pub fn mul_vec(&self, v: &RVector) -> RVector {
        debug_assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for (a, b) in self.row(i).iter().zip(v.iter()) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &RMatrix) -> RMatrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = RMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for (k, a) in self.row(i).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in other.row(k).iter().enumerate() {
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &RMatrix) -> RMatrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RMatrix) -> RMatrix {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> RMatrix {
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    fn zip_with(&self, other: &RMatrix, f: impl Fn(&Rational, &Rational) -> Rational) -> RMatrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|a| !a.is_negative())
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(Rational::zero(), |acc, a| acc + a))
            .collect()
    }

    /// Non-negative with every row summing to exactly one.
    pub fn is_stochastic(&self) -> bool {
        self.is_nonnegative() && self.row_sums().iter().all(One::is_one)
    }

    /// Conjugates by a state permutation: entry `(i, j)` moves to
    /// `(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> RMatrix {
        let mut out = RMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(perm[i], perm[j])] = self[(i, j)].clone();
            }
        }
        out
    }

    /// The matrix flattened row-major into a vector, for rank computations
    /// over sets of matrices.
    pub fn flatten(&self) -> RVector {
        RVector(self.data.clone())
    }
}

impl Index<(usize, usize)> for RMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Result of exact Gauss-Jordan elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: RMatrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

/// Reduced row-echelon form of `m`.
pub fn rref(m: &RMatrix) -> Rref {
    let mut a = m.clone();
    let mut rank = 0;
    let mut pivot_cols = Vec::new();
    for col in 0..a.cols {
        if rank == a.rows {
            break;
        }
        let Some(p) = (rank..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        if p != rank {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, rank * a.cols + j);
            }
        }
        let inv = a[(rank, col)].recip();
        for j in col..a.cols {
            let v = &a[(rank, j)] * &inv;
            a[(rank, j)] = v;
        }
        let pivot_row: Vec<Rational> = a.row(rank).to_vec();
        for r in 0..a.rows {
            if r == rank || a[(r, col)].is_zero() {
                continue;
            }
            let factor = a[(r, col)].clone();
            for (j, pv) in pivot_row.iter().enumerate().skip(col) {
                if !pv.is_zero() {
                    let v = &a[(r, j)] - &factor * pv;
                    a[(r, j)] = v;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }
    Rref {
        reduced: a,
        rank,
        pivot_cols,
    }
}

/// Exact rank of a set of vectors.
pub fn rank_of(vectors: &[RVector]) -> usize {
    let Some(first) = vectors.first() else {
        return 0;
    };
    let mut basis = EchelonBasis::new(first.len());
    for v in vectors {
        // Lengths are equal by construction at all call sites.
        let _ = basis.insert(v);
    }
    basis.rank()
}

#[derive(Clone, Debug)]
struct EchelonRow {
    pivot: usize,
    vector: Vec<Rational>,
    /// Expresses `vector` in terms of the inserted originals.
    combo: Vec<Rational>,
}

/// Incrementally maintained row-echelon basis.
///
/// Row `r` has a unit pivot at `pivot`, and zeros at the pivots of all rows
/// inserted before it, so reducing a vector against the rows in insertion
/// order clears every pivot position.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    dim: usize,
    rows: Vec<EchelonRow>,
    track_coordinates: bool,
}

impl EchelonBasis {
    /// Membership-only basis.
    pub fn new(dim: usize) -> Self {
        EchelonBasis {
            dim,
            rows: Vec::new(),
            track_coordinates: false,
        }
    }

    /// Basis that can also express members in terms of the inserted vectors.
    pub fn with_coordinates(dim: usize) -> Self {
        EchelonBasis {
            track_coordinates: true,
            ..Self::new(dim)
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    fn check_len(&self, v: &[Rational]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Residual of `v` after reduction, plus the multiplier used per row.
    fn reduce(&self, v: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let mut residual = v.to_vec();
        let mut mults = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let c = residual[row.pivot].clone();
            if !c.is_zero() {
                for (j, x) in row.vector.iter().enumerate().skip(row.pivot) {
                    if !x.is_zero() {
                        residual[j] -= &c * x;
                    }
                }
            }
            mults.push(c);
        }
        (residual, mults)
    }

    pub fn contains(&self, v: &[Rational]) -> Result<bool> {
        self.check_len(v)?;
        if self.is_full() {
            return Ok(true);
        }
        let (residual, _) = self.reduce(v);
        Ok(residual.iter().all(Zero::is_zero))
    }

    /// Adds `v` if it is outside the current span. Returns whether it was added.
    pub fn insert(&mut self, v: &[Rational]) -> Result<bool> {
        self.check_len(v)?;
        if self.is_full() {
            return Ok(false);
        }
        let (mut residual, mults) = self.reduce(v);
        let Some(pivot) = residual.iter().position(|x| !x.is_zero()) else {
            return Ok(false);
        };
        let inv = residual[pivot].recip();
        for x in residual.iter_mut().skip(pivot) {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let combo = if self.track_coordinates {
            // residual = v - sum_r mults[r] * row_r
            let n = self.rows.len();
            let mut combo = vec![Rational::zero(); n + 1];
            combo[n] = Rational::one();
            for (row, c) in self.rows.iter().zip(&mults) {
                if c.is_zero() {
                    continue;
                }
                for (k, b) in row.combo.iter().enumerate() {
                    if !b.is_zero() {
                        combo[k] -= c * b;
                    }
                }
            }
            combo.iter_mut().for_each(|x| *x *= &inv);
            combo
        } else {
            Vec::new()
        };
        self.rows.push(EchelonRow {
            pivot,
            vector: residual,
            combo,
        });
        Ok(true)
    }

    /// Coefficients expressing `v` in terms of the inserted vectors, or
    /// `None` when `v` lies outside the span.
    pub fn coordinates(&self, v: &[Rational]) -> Result<Option<Vec<Rational>>> {
        self.check_len(v)?;
        assert!(
            self.track_coordinates,
            "EchelonBasis::coordinates requires with_coordinates()"
        );
        let (residual, mults) = self.reduce(v);
        if !residual.iter().all(Zero::is_zero) {
            return Ok(None);
        }
        let mut coords = vec![Rational::zero(); self.rows.len()];
        for (row, c) in self.rows.iter().zip(&mults) {
            if c.is_zero() {
                continue;
            }
            for (k, b) in row.combo.iter().enumerate() {
                if !b.is_zero() {
                    coords[k] += c * b;
                }
            }
        }
        Ok(Some(coords))
    }
}

/// Exact coefficients `c` with `v = sum_i c_i * basis_i`, or `None` if `v`
/// is outside the span. Fails if the basis is linearly dependent.
pub fn coordinates_in_span(v: &RVector, basis: &[RVector]) -> Result<Option<Vec<Rational>>> {
    let mut echelon = EchelonBasis::with_coordinates(v.len());
    for b in basis {
        if !echelon.insert(b)? {
            return Err(Error::DependentBasis);
        }
    }
    echelon.coordinates(v)
}

/// Basis of `span{ G(w) * seed }` produced by [`span_closure`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanBasis {
    pub dimension: usize,
    pub vectors: Vec<RVector>,
    /// `words[i]` lists generator indices `a_1 .. a_n` such that
    /// `vectors[i] = G(a_1) * ... * G(a_n) * seed`.
    pub words: Vec<Vec<usize>>,
}

impl SpanBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Fixed-point closure of `seed` under the generators.
///
/// Candidates `G(a) * v` are explored breadth first (basis vectors in
/// insertion order, generators in index order), so each stored word is a
/// shortest one and the result is deterministic. At most `dim` vectors are
/// added.
pub fn span_closure(seed: &RVector, generators: &[RMatrix]) -> Result<SpanBasis> {
    let dim = seed.len();
    for g in generators {
        if g.rows() != dim || g.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: if g.rows() != dim { g.rows() } else { g.cols() },
            });
        }
    }
    let mut basis = SpanBasis {
        dimension: dim,
        vectors: Vec::new(),
        words: Vec::new(),
    };
    let mut tester = IndependenceTester::new(dim);
    if !tester.insert(seed, &basis.vectors) {
        return Ok(basis);
    }
    basis.vectors.push(seed.clone());
    basis.words.push(Vec::new());

    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (a, g) in generators.iter().enumerate() {
            if basis.len() == dim {
                return Ok(basis);
            }
            let candidate = g.mul_vec(&basis.vectors[i]);
            if tester.insert(&candidate, &basis.vectors) {
                let mut word = Vec::with_capacity(basis.words[i].len() + 1);
                word.push(a);
                word.extend_from_slice(&basis.words[i]);
                queue.push_back(basis.vectors.len());
                basis.vectors.push(candidate);
                basis.words.push(word);
            }
        }
    }
    Ok(basis)
}

/// `2^64 - 59`, the largest prime below `2^64`.
const MODULUS: u64 = 0xffff_ffff_ffff_ffc5;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn sub_mod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        MODULUS - (b - a)
    }
}

fn inv_mod(a: u64) -> u64 {
    // Fermat: a^(p-2).
    let (mut base, mut exp, mut acc) = (a, MODULUS - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

/// Image of `x` in `F_p`, or `None` when `p` divides the denominator.
fn to_mod(x: &Rational) -> Option<u64> {
    let m = BigInt::from(MODULUS);
    let reduce = |n: &BigInt| -> u64 {
        let r = ((n % &m) + &m) % &m;
        r.iter_u64_digits().next().unwrap_or(0)
    };
    let den = reduce(x.denom());
    (den != 0).then(|| mul_mod(reduce(x.numer()), inv_mod(den)))
}

/// Row-echelon form over `F_p`, same layout as [`EchelonBasis`].
struct ModularEchelon {
    rows: Vec<(usize, Vec<u64>)>,
}

impl ModularEchelon {
    /// Inserts `v` if it is independent of the rows mod `p`.
    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        for (pivot, row) in &self.rows {
            let c = v[*pivot];
            if c != 0 {
                for (x, r) in v.iter_mut().zip(row).skip(*pivot) {
                    if *r != 0 {
                        *x = sub_mod(*x, mul_mod(c, *r));
                    }
                }
            }
        }
        let Some(pivot) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(v[pivot]);
        v.iter_mut().skip(pivot).for_each(|x| *x = mul_mod(*x, inv));
        self.rows.push((pivot, v));
        true
    }
}

/// Exact independence test for a growing vector set, with a modular
/// shortcut.
///
/// Independence mod `p` implies independence over the rationals, so a
/// candidate whose image is independent of the images of the accepted
/// vectors is accepted without exact elimination. Any other candidate is
/// decided by the exact [`EchelonBasis`], which is brought up to date
/// first. The shortcut stays sound only while the modular rows are the
/// images of all accepted vectors; once an accepted vector has no
/// independent image it is switched off.
struct IndependenceTester {
    modular: Option<ModularEchelon>,
    exact: EchelonBasis,
    /// Accepted vectors `0..synced` are in `exact`.
    synced: usize,
}

impl IndependenceTester {
    fn new(dim: usize) -> Self {
        IndependenceTester {
            modular: Some(ModularEchelon { rows: Vec::new() }),
            exact: EchelonBasis::new(dim),
            synced: 0,
        }
    }

    /// Whether `v` is independent of `accepted`, the vectors this tester
    /// has accepted so far. Accepts `v` if so.
    fn insert(&mut self, v: &[Rational], accepted: &[RVector]) -> bool {
        if let Some(modular) = &mut self.modular {
            if let Some(image) = v.iter().map(to_mod).collect::<Option<Vec<u64>>>() {
                if modular.insert(image) {
                    return true;
                }
            }
        }
        for w in &accepted[self.synced..] {
            self.exact.insert(w).expect("lengths checked by span_closure");
        }
        self.synced = accepted.len();
        let added = self.exact.insert(v).expect("lengths checked by span_closure");
        if added {
            self.modular = None;
            self.synced += 1;
        }
        added
    }
}
