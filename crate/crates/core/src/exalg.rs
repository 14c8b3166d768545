//! Dense exact matrices, minors, determinants, inverses and the
//! Cauchy–Binet map `x ↦ ∧^m x`.
//!
//! Determinants use Bareiss elimination over ℤ and Gaussian elimination with
//! unit pivots over ℚ and ℤ/m. Over a composite modulus elimination can get
//! stuck on a column of zero divisors; the remaining block is then handled by
//! the division-free Berkowitz algorithm.

use std::fmt;

use thiserror::Error;

use crate::combinat::{binomial, subsets, CombinatError, IndexSet};
use crate::scalar::{RingTag, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("shape mismatch: {0} vs {1}")]
    ShapeMismatch(Indexing, Indexing),
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(RingTag, RingTag),
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("expected {expected} entries, got {got}")]
    EntryCount { expected: usize, got: usize },
    #[error("expected a {expected} matrix, got {got}")]
    WrongIndexing { expected: &'static str, got: Indexing },
    #[error(transparent)]
    Index(#[from] CombinatError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// How the rows and columns of a square matrix are labelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Indexing {
    /// Rows and columns are `1..=n`.
    Plain(usize),
    /// Rows and columns are the `m`-subsets of `[n]` in lex order.
    Wedge { m: usize, n: usize },
}

impl Indexing {
    pub fn wedge2(n: usize) -> Self {
        Indexing::Wedge { m: 2, n }
    }

    pub fn wedge4(n: usize) -> Self {
        Indexing::Wedge { m: 4, n }
    }

    pub fn side(self) -> usize {
        match self {
            Indexing::Plain(n) => n,
            Indexing::Wedge { m, n } => binomial(n, m),
        }
    }

    /// The rank `n` of the underlying `GL_n`.
    pub fn base_rank(self) -> usize {
        match self {
            Indexing::Plain(n) | Indexing::Wedge { n, .. } => n,
        }
    }

    /// Row label of position `pos`.
    pub fn label(self, pos: usize) -> String {
        match self {
            Indexing::Plain(_) => (pos + 1).to_string(),
            Indexing::Wedge { m, n } => crate::combinat::unrank(pos, n, m)
                .map(|s| s.label(n))
                .unwrap_or_else(|_| format!("#{pos}")),
        }
    }
}

impl fmt::Display for Indexing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Indexing::Plain(n) => write!(f, "plain({n})"),
            Indexing::Wedge { m, n } => write!(f, "wedge{m}({n})"),
        }
    }
}

/// A dense square matrix over one exact ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareMatrix {
    ring: RingTag,
    indexing: Indexing,
    side: usize,
    entries: Vec<Scalar>,
}

impl SquareMatrix {
    /// Builds a matrix from row-major entries, checking count and ring.
    pub fn new(
        ring: RingTag,
        indexing: Indexing,
        entries: Vec<Scalar>,
    ) -> Result<Self, MatrixError> {
        let side = indexing.side();
        if entries.len() != side * side {
            return Err(MatrixError::EntryCount {
                expected: side * side,
                got: entries.len(),
            });
        }
        if let Some(bad) = entries.iter().find(|e| e.ring() != ring) {
            return Err(MatrixError::RingMismatch(ring, bad.ring()));
        }
        Ok(SquareMatrix {
            ring,
            indexing,
            side,
            entries,
        })
    }

    pub fn from_fn(
        ring: RingTag,
        indexing: Indexing,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Self {
        let side = indexing.side();
        let entries = (0..side * side).map(|k| f(k / side, k % side)).collect();
        SquareMatrix {
            ring,
            indexing,
            side,
            entries,
        }
    }

    pub fn from_i64(ring: RingTag, indexing: Indexing, rows: &[&[i64]]) -> Result<Self, MatrixError> {
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().map(|&v| Scalar::from_i64(ring, v)))
            .collect();
        Self::new(ring, indexing, entries)
    }

    pub fn zeros(ring: RingTag, indexing: Indexing) -> Self {
        let zero = Scalar::zero(ring);
        Self::from_fn(ring, indexing, |_, _| zero.clone())
    }

    pub fn identity(ring: RingTag, indexing: Indexing) -> Self {
        Self::scalar(Scalar::one(ring), indexing)
    }

    /// `c · identity`.
    pub fn scalar(c: Scalar, indexing: Indexing) -> Self {
        let ring = c.ring();
        let zero = Scalar::zero(ring);
        Self::from_fn(ring, indexing, |r, k| if r == k { c.clone() } else { zero.clone() })
    }

    pub fn ring(&self) -> RingTag {
        self.ring
    }

    pub fn indexing(&self) -> Indexing {
        self.indexing
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> &Scalar {
        &self.entries[row * self.side + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Scalar) {
        assert_eq!(value.ring(), self.ring, "ring mismatch");
        self.entries[row * self.side + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Scalar] {
        &self.entries[row * self.side..(row + 1) * self.side]
    }

    pub fn is_identity(&self) -> bool {
        (0..self.side).all(|r| {
            (0..self.side).all(|c| {
                let e = self.get(r, c);
                if r == c {
                    e.is_one()
                } else {
                    e.is_zero()
                }
            })
        })
    }

    /// Same entries under a different labelling of the same size.
    pub fn relabel(mut self, indexing: Indexing) -> Result<Self, MatrixError> {
        if indexing.side() != self.side {
            return Err(MatrixError::ShapeMismatch(self.indexing, indexing));
        }
        self.indexing = indexing;
        Ok(self)
    }

    /// Entrywise image in another ring (e.g. reduction ℤ → ℤ/m).
    pub fn convert(&self, ring: RingTag) -> Result<Self, MatrixError> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.convert(ring))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SquareMatrix {
            ring,
            indexing: self.indexing,
            side: self.side,
            entries,
        })
    }

    fn check_compatible(&self, other: &SquareMatrix) -> Result<(), MatrixError> {
        if self.ring != other.ring {
            return Err(MatrixError::RingMismatch(self.ring, other.ring));
        }
        if self.indexing != other.indexing {
            return Err(MatrixError::ShapeMismatch(self.indexing, other.indexing));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &SquareMatrix) -> Result<SquareMatrix, MatrixError> {
        self.check_compatible(other)?;
        let n = self.side;
        let zero = Scalar::zero(self.ring);
        let mut out = vec![zero; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let slot = &mut out[i * n + j];
                        *slot = &*slot + &(a * b);
                    }
                }
            }
        }
        Ok(SquareMatrix {
            ring: self.ring,
            indexing: self.indexing,
            side: n,
            entries: out,
        })
    }

    pub fn add(&self, other: &SquareMatrix) -> Result<SquareMatrix, MatrixError> {
        self.check_compatible(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(SquareMatrix {
            entries,
            ..self.clone()
        })
    }

    pub fn scale(&self, c: &Scalar) -> Result<SquareMatrix, MatrixError> {
        if c.ring() != self.ring {
            return Err(MatrixError::RingMismatch(self.ring, c.ring()));
        }
        let entries = self.entries.iter().map(|a| a * c).collect();
        Ok(SquareMatrix {
            entries,
            ..self.clone()
        })
    }

    pub fn transpose(&self) -> SquareMatrix {
        Self::from_fn(self.ring, self.indexing, |r, c| self.get(c, r).clone())
    }

    pub fn determinant(&self) -> Scalar {
        let rows: Vec<Vec<Scalar>> = (0..self.side).map(|r| self.row(r).to_vec()).collect();
        determinant_of(self.ring, rows)
    }

    pub fn is_invertible(&self) -> bool {
        self.determinant().is_unit()
    }

    /// Exact inverse; `NotInvertible` unless the determinant is a unit.
    pub fn inverse(&self) -> Result<SquareMatrix, MatrixError> {
        let inv_rows = match self.ring {
            RingTag::Integers => {
                if !self.determinant().is_unit() {
                    return Err(MatrixError::NotInvertible);
                }
                let over_q = self.convert(RingTag::Rationals)?;
                let inv = gauss_jordan(&over_q).ok_or(MatrixError::NotInvertible)?;
                return inv.convert(RingTag::Integers);
            }
            _ => gauss_jordan(self),
        };
        match inv_rows {
            Some(inv) => Ok(inv),
            None => {
                // Stuck on zero divisors: adj(a) · det(a)^{-1}.
                let det = self.determinant();
                let det_inv = det.inv().map_err(|_| MatrixError::NotInvertible)?;
                adjugate(self).scale(&det_inv)
            }
        }
    }

    /// Determinant of the submatrix on 0-based `rows × cols`.
    pub fn sub_determinant(&self, rows: &[usize], cols: &[usize]) -> Scalar {
        debug_assert_eq!(rows.len(), cols.len());
        let k = rows.len();
        if k <= 4 {
            return laplace(self.ring, &|r, c| self.get(rows[r], cols[c]).clone(), k);
        }
        let sub: Vec<Vec<Scalar>> = rows
            .iter()
            .map(|&r| cols.iter().map(|&c| self.get(r, c).clone()).collect())
            .collect();
        determinant_of(self.ring, sub)
    }

    /// The minor on rows `i` and columns `j`, given as 1-based positions.
    pub fn minor(&self, i: &IndexSet, j: &IndexSet) -> Result<Scalar, MatrixError> {
        if i.arity() != j.arity() || i.arity() > self.side {
            return Err(CombinatError::ArityOutOfRange {
                n: self.side,
                m: i.arity().max(j.arity()),
            }
            .into());
        }
        let rows = IndexSet::new(i.elems().to_vec(), self.side)?;
        let cols = IndexSet::new(j.elems().to_vec(), self.side)?;
        let r: Vec<usize> = rows.elems().iter().map(|e| e - 1).collect();
        let c: Vec<usize> = cols.elems().iter().map(|e| e - 1).collect();
        Ok(self.sub_determinant(&r, &c))
    }
}

/// The `m`-th compound matrix: entry `(I, J)` is the minor `M_I^J(x)`.
pub fn wedge(m: usize, x: &SquareMatrix) -> Result<SquareMatrix, MatrixError> {
    let Indexing::Plain(n) = x.indexing else {
        return Err(MatrixError::WrongIndexing {
            expected: "plain",
            got: x.indexing,
        });
    };
    if m == 0 || m > n {
        return Err(CombinatError::ArityOutOfRange { n, m }.into());
    }
    let sets: Vec<Vec<usize>> = subsets(n, m)?
        .into_iter()
        .map(|s| s.elems().iter().map(|e| e - 1).collect())
        .collect();
    let indexing = Indexing::Wedge { m, n };
    Ok(SquareMatrix::from_fn(x.ring, indexing, |r, c| {
        x.sub_determinant(&sets[r], &sets[c])
    }))
}

fn laplace(ring: RingTag, at: &dyn Fn(usize, usize) -> Scalar, k: usize) -> Scalar {
    match k {
        0 => Scalar::one(ring),
        1 => at(0, 0),
        2 => &(&at(0, 0) * &at(1, 1)) - &(&at(0, 1) * &at(1, 0)),
        _ => {
            // Expand along the first row.
            let mut acc = Scalar::zero(ring);
            for c in 0..k {
                let a = at(0, c);
                if a.is_zero() {
                    continue;
                }
                let sub = |r: usize, cc: usize| at(r + 1, if cc < c { cc } else { cc + 1 });
                let term = &a * &laplace(ring, &sub, k - 1);
                acc = if c % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

fn determinant_of(ring: RingTag, rows: Vec<Vec<Scalar>>) -> Scalar {
    match ring {
        RingTag::Integers => bareiss(ring, rows),
        _ => eliminate(ring, rows),
    }
}

/// Fraction-free Bareiss elimination; every division is exact over ℤ.
fn bareiss(ring: RingTag, mut a: Vec<Vec<Scalar>>) -> Scalar {
    let n = a.len();
    if n == 0 {
        return Scalar::one(ring);
    }
    let mut sign = false;
    let mut prev = num_bigint::BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = !sign;
                }
                None => return Scalar::zero(ring),
            }
        }
        let pivot = a[k][k].as_integer().expect("integer entries").clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let aij = a[i][j].as_integer().expect("integer entries");
                let aik = a[i][k].as_integer().expect("integer entries");
                let akj = a[k][j].as_integer().expect("integer entries");
                let v = (&pivot * aij - aik * akj) / &prev;
                a[i][j] = Scalar::from_bigint(ring, &v);
            }
        }
        prev = pivot;
    }
    let det = a[n - 1][n - 1].clone();
    if sign {
        -det
    } else {
        det
    }
}

/// Gaussian elimination with unit pivots; falls back to Berkowitz on the
/// trailing block when a column has no unit below the diagonal.
fn eliminate(ring: RingTag, mut a: Vec<Vec<Scalar>>) -> Scalar {
    let n = a.len();
    let mut factor = Scalar::one(ring);
    for k in 0..n {
        let pivot_row = (k..n).find(|&r| a[r][k].is_unit());
        let Some(p) = pivot_row else {
            if (k..n).all(|r| a[r][k].is_zero()) {
                return Scalar::zero(ring);
            }
            let block: Vec<Vec<Scalar>> = a[k..].iter().map(|row| row[k..].to_vec()).collect();
            return &factor * &berkowitz_det(ring, &block);
        };
        if p != k {
            a.swap(p, k);
            factor = -factor;
        }
        let inv = a[k][k].inv().expect("unit pivot");
        factor = &factor * &a[k][k];
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let m = &a[i][k] * &inv;
            let (top, rest) = a.split_at_mut(i);
            let pivot_row = &top[k];
            for (x, p) in rest[0][k..n].iter_mut().zip(&pivot_row[k..n]) {
                *x = &*x - &(&m * p);
            }
        }
    }
    factor
}

/// Coefficients `[1, c_1, …, c_n]` of `det(t·I − a)`, division-free.
fn berkowitz(ring: RingTag, a: &[Vec<Scalar>]) -> Vec<Scalar> {
    let n = a.len();
    let mut poly = vec![Scalar::one(ring)];
    for r in 0..n {
        // Extend from the leading r×r block to (r+1)×(r+1).
        let mut toeplitz = Vec::with_capacity(r + 2);
        toeplitz.push(Scalar::one(ring));
        toeplitz.push(-a[r][r].clone());
        let mut v: Vec<Scalar> = (0..r).map(|i| a[i][r].clone()).collect();
        for _ in 0..r {
            let dot = (0..r).fold(Scalar::zero(ring), |acc, j| &acc + &(&a[r][j] * &v[j]));
            toeplitz.push(-dot);
            v = (0..r)
                .map(|i| (0..r).fold(Scalar::zero(ring), |acc, j| &acc + &(&a[i][j] * &v[j])))
                .collect();
        }
        let next: Vec<Scalar> = (0..r + 2)
            .map(|i| {
                (0..=r.min(i)).fold(Scalar::zero(ring), |acc, j| {
                    if i - j < toeplitz.len() && j < poly.len() {
                        &acc + &(&toeplitz[i - j] * &poly[j])
                    } else {
                        acc
                    }
                })
            })
            .collect();
        poly = next;
    }
    poly
}

fn berkowitz_det(ring: RingTag, a: &[Vec<Scalar>]) -> Scalar {
    let n = a.len();
    let poly = berkowitz(ring, a);
    if n.is_multiple_of(2) {
        poly[n].clone()
    } else {
        -poly[n].clone()
    }
}

/// Classical adjoint via Cayley–Hamilton.
fn adjugate(a: &SquareMatrix) -> SquareMatrix {
    let n = a.side;
    let rows: Vec<Vec<Scalar>> = (0..n).map(|r| a.row(r).to_vec()).collect();
    let poly = berkowitz(a.ring, &rows);
    // Horner: A^{n-1} + c_1 A^{n-2} + … + c_{n-1} I
    let mut acc = SquareMatrix::identity(a.ring, a.indexing);
    for c in poly.iter().take(n).skip(1) {
        let shifted = SquareMatrix::scalar(c.clone(), a.indexing);
        acc = a.matmul(&acc).and_then(|m| m.add(&shifted)).expect("same shape");
    }
    if n % 2 == 1 {
        acc
    } else {
        acc.scale(&Scalar::from_i64(a.ring, -1)).expect("same ring")
    }
}

/// Gauss–Jordan inverse with unit pivots; `None` if singular or stuck.
fn gauss_jordan(a: &SquareMatrix) -> Option<SquareMatrix> {
    let n = a.side;
    let ring = a.ring;
    let mut left: Vec<Vec<Scalar>> = (0..n).map(|r| a.row(r).to_vec()).collect();
    let mut right: Vec<Vec<Scalar>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| Scalar::from_i64(ring, i64::from(r == c)))
                .collect()
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&r| left[r][k].is_unit())?;
        left.swap(p, k);
        right.swap(p, k);
        let inv = left[k][k].inv().ok()?;
        for j in 0..n {
            left[k][j] = &left[k][j] * &inv;
            right[k][j] = &right[k][j] * &inv;
        }
        for i in 0..n {
            if i == k || left[i][k].is_zero() {
                continue;
            }
            let m = left[i][k].clone();
            for j in 0..n {
                left[i][j] = &left[i][j] - &(&m * &left[k][j]);
                right[i][j] = &right[i][j] - &(&m * &right[k][j]);
            }
        }
    }
    let entries = right.into_iter().flatten().collect();
    SquareMatrix::new(ring, a.indexing, entries).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z: RingTag = RingTag::Integers;
    const F97: RingTag = RingTag::IntegersMod(97);

    fn set(e: &[usize], n: usize) -> IndexSet {
        IndexSet::new(e.to_vec(), n).unwrap()
    }

    #[test]
    fn identity_minors() {
        let id = SquareMatrix::identity(Z, Indexing::Plain(4));
        for i in subsets(4, 2).unwrap() {
            for j in subsets(4, 2).unwrap() {
                let expect = i64::from(i == j);
                assert_eq!(id.minor(&i, &j).unwrap(), Scalar::from_i64(Z, expect));
            }
        }
    }

    #[test]
    fn two_by_two_minor() {
        let m = SquareMatrix::from_i64(Z, Indexing::Plain(2), &[&[3, 5], &[7, 11]]).unwrap();
        let s = set(&[1, 2], 2);
        assert_eq!(m.minor(&s, &s).unwrap(), Scalar::from_i64(Z, 3 * 11 - 5 * 7));
        assert!(m.minor(&s, &set(&[1], 2)).is_err());
    }

    #[test]
    fn determinants_agree_across_algorithms() {
        let m = SquareMatrix::from_i64(
            Z,
            Indexing::Plain(4),
            &[&[2, -1, 0, 3], &[1, 4, -2, 0], &[0, 5, 1, -1], &[3, 0, 2, 2]],
        )
        .unwrap();
        let rows: Vec<Vec<Scalar>> = (0..4).map(|r| m.row(r).to_vec()).collect();
        let lap = laplace(Z, &|r, c| rows[r][c].clone(), 4);
        assert_eq!(m.determinant(), lap);
        assert_eq!(berkowitz_det(Z, &rows), lap);
        let q = m.convert(RingTag::Rationals).unwrap();
        assert_eq!(q.determinant().to_string(), lap.to_string());
    }

    #[test]
    fn composite_modulus_falls_back() {
        // Over ℤ/12 the first column holds only zero divisors.
        let z12 = RingTag::IntegersMod(12);
        let over_z =
            SquareMatrix::from_i64(Z, Indexing::Plain(3), &[&[2, 1, 0], &[4, 3, 1], &[6, 0, 5]])
                .unwrap();
        let m = over_z.convert(z12).unwrap();
        assert_eq!(m.determinant(), over_z.determinant().convert(z12).unwrap());
        // det = 2*(15) - 1*(20-6) = 16 ≡ 4 (mod 12): not a unit.
        assert_eq!(m.inverse(), Err(MatrixError::NotInvertible));
        let unimod =
            SquareMatrix::from_i64(Z, Indexing::Plain(2), &[&[2, 3], &[3, 5]]).unwrap();
        let u12 = unimod.convert(z12).unwrap();
        let inv = u12.inverse().unwrap();
        assert!(u12.matmul(&inv).unwrap().is_identity());
    }

    #[test]
    fn integer_inverse() {
        let m = SquareMatrix::from_i64(Z, Indexing::Plain(2), &[&[2, 3], &[1, 2]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(
            inv,
            SquareMatrix::from_i64(Z, Indexing::Plain(2), &[&[2, -3], &[-1, 2]]).unwrap()
        );
        let sing = SquareMatrix::from_i64(Z, Indexing::Plain(2), &[&[2, 0], &[0, 1]]).unwrap();
        assert_eq!(sing.inverse(), Err(MatrixError::NotInvertible));
    }

    #[test]
    fn wedge_of_transvection() {
        // t_{1,2}(5) for n = 3; rows/cols of the wedge are 12, 13, 23.
        let mut t = SquareMatrix::identity(F97, Indexing::Plain(3));
        t.set(0, 1, Scalar::from_i64(F97, 5));
        let w = wedge(2, &t).unwrap();
        let mut expect = SquareMatrix::identity(F97, Indexing::wedge2(3));
        expect.set(1, 2, Scalar::from_i64(F97, 5));
        assert_eq!(w, expect);
    }

    #[test]
    fn wedge_of_scalar_and_identity() {
        let c = Scalar::from_i64(Z, 3);
        let x = SquareMatrix::scalar(c, Indexing::Plain(5));
        let w = wedge(2, &x).unwrap();
        assert_eq!(w, SquareMatrix::scalar(Scalar::from_i64(Z, 9), Indexing::wedge2(5)));
        let id = SquareMatrix::identity(Z, Indexing::Plain(6));
        assert!(wedge(4, &id).unwrap().is_identity());
        assert!(wedge(7, &id).is_err());
        assert!(wedge(2, &w).is_err());
    }

    #[test]
    fn mismatches() {
        let a = SquareMatrix::identity(Z, Indexing::Plain(3));
        let b = SquareMatrix::identity(F97, Indexing::Plain(3));
        let c = SquareMatrix::identity(Z, Indexing::Plain(4));
        assert!(matches!(a.matmul(&b), Err(MatrixError::RingMismatch(..))));
        assert!(matches!(a.matmul(&c), Err(MatrixError::ShapeMismatch(..))));
        assert!(matches!(
            SquareMatrix::new(Z, Indexing::Plain(2), vec![Scalar::zero(Z); 3]),
            Err(MatrixError::EntryCount { .. })
        ));
    }
}
