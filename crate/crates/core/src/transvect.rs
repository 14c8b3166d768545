//! Elementary transvections `t_{r,c}(ξ) = e + ξ·e_{r,c}` and the
//! factorisation of `∧²t_{i,j}(ξ)` into `n − 2` commuting transvections of
//! `GL_N`.

use itertools::Itertools;
use rand::Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::combinat::{CombinatError, Pair};
use crate::exalg::{wedge, Indexing, MatrixError, SquareMatrix};
use crate::random::{rng_from_seed, random_scalar};
use crate::scalar::{RingTag, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransvectError {
    #[error("rank {n} too small, need n >= {min}")]
    RankTooSmall { n: usize, min: usize },
    #[error(transparent)]
    Index(#[from] CombinatError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// `e + param · e_{row,col}` on a space indexed by `indexing`.
/// `row` and `col` are 0-based positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transvection {
    pub indexing: Indexing,
    pub row: usize,
    pub col: usize,
    pub param: Scalar,
}

impl Transvection {
    /// `t_{i,j}(ξ)` in `GL_n`, labels 1-based.
    pub fn plain(n: usize, i: usize, j: usize, param: Scalar) -> Result<Self, TransvectError> {
        if i == j || !(1..=n).contains(&i) || !(1..=n).contains(&j) {
            return Err(invalid(vec![i, j], n));
        }
        Ok(Transvection {
            indexing: Indexing::Plain(n),
            row: i - 1,
            col: j - 1,
            param,
        })
    }

    /// `t_{a,b}(ξ)` in `GL_N`, `N = C(n,2)`.
    pub fn wedge2(n: usize, a: Pair, b: Pair, param: Scalar) -> Result<Self, TransvectError> {
        for p in [a, b] {
            Pair::new(p.lo(), p.hi(), n)?;
        }
        if a == b {
            return Err(invalid(vec![a.lo(), a.hi()], n));
        }
        Ok(Transvection {
            indexing: Indexing::wedge2(n),
            row: a.rank(n),
            col: b.rank(n),
            param,
        })
    }

    /// `t_{(a1,a2),(b1,b2)}(ξ)` with the pairs written in any order.
    /// Reordering a pair flips the basis vector, so the sign lands in `ξ`.
    pub fn wedge2_oriented(
        n: usize,
        a: (usize, usize),
        b: (usize, usize),
        param: &Scalar,
    ) -> Result<Self, TransvectError> {
        let (pa, sa) = Pair::oriented(a.0, a.1).ok_or_else(|| invalid(vec![a.0, a.1], n))?;
        let (pb, sb) = Pair::oriented(b.0, b.1).ok_or_else(|| invalid(vec![b.0, b.1], n))?;
        let param = if sa * sb > 0 { param.clone() } else { -param.clone() };
        Self::wedge2(n, pa, pb, param)
    }

    pub fn inverse(&self) -> Transvection {
        Transvection {
            param: -self.param.clone(),
            ..self.clone()
        }
    }

    pub fn to_matrix(&self) -> SquareMatrix {
        let mut m = SquareMatrix::identity(self.param.ring(), self.indexing);
        m.set(self.row, self.col, self.param.clone());
        m
    }

    /// `m ← m · t`: adds `param` times column `row` to column `col`.
    pub fn apply_right(&self, m: &mut SquareMatrix) {
        if self.param.is_zero() {
            return;
        }
        for r in 0..m.side() {
            let x = m.get(r, self.row);
            if x.is_zero() {
                continue;
            }
            let v = m.get(r, self.col) + &(x * &self.param);
            m.set(r, self.col, v);
        }
    }

    pub fn row_label(&self) -> String {
        self.indexing.label(self.row)
    }

    pub fn col_label(&self) -> String {
        self.indexing.label(self.col)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "row": self.row_label(),
            "col": self.col_label(),
            "param": self.param.to_string(),
        })
    }
}

fn invalid(elems: Vec<usize>, n: usize) -> TransvectError {
    CombinatError::InvalidIndexSet { elems, n }.into()
}

/// Product of the factors, left to right, computed by column operations.
pub fn product(ring: RingTag, indexing: Indexing, factors: &[&Transvection]) -> SquareMatrix {
    let mut m = SquareMatrix::identity(ring, indexing);
    for t in factors {
        t.apply_right(&mut m);
    }
    m
}

/// `[a, b] = a·b·a⁻¹·b⁻¹`.
pub fn commutator(a: &Transvection, b: &Transvection) -> Result<SquareMatrix, TransvectError> {
    if a.indexing != b.indexing {
        return Err(MatrixError::ShapeMismatch(a.indexing, b.indexing).into());
    }
    let (ai, bi) = (a.inverse(), b.inverse());
    Ok(product(a.param.ring(), a.indexing, &[a, b, &ai, &bi]))
}

fn check_ij(n: usize, i: usize, j: usize) -> Result<(), TransvectError> {
    if n < 3 {
        return Err(TransvectError::RankTooSmall { n, min: 3 });
    }
    if i == j || !(1..=n).contains(&i) || !(1..=n).contains(&j) {
        return Err(invalid(vec![i, j], n));
    }
    Ok(())
}

/// The `n − 2` factors of `∧²t_{i,j}(ξ)`.
///
/// For `i < j`: `t_{ki,kj}(ξ)` for `k < i`, `t_{il,lj}(−ξ)` for `i < l < j`,
/// `t_{im,jm}(ξ)` for `m > j`. For `i > j` the middle factors are
/// `t_{li,jl}(−ξ)` for `j < l < i` and the outer ranges are bounded by
/// `min(i,j)` and `max(i,j)`.
pub fn decompose_wedge2(
    n: usize,
    i: usize,
    j: usize,
    xi: &Scalar,
) -> Result<Vec<Transvection>, TransvectError> {
    check_ij(n, i, j)?;
    let (lo, hi) = (i.min(j), i.max(j));
    let neg = -xi.clone();
    let mut out = Vec::with_capacity(n - 2);
    for k in 1..lo {
        out.push(Transvection::wedge2_oriented(n, (k, i), (k, j), xi)?);
    }
    for l in lo + 1..hi {
        let t = if i < j {
            Transvection::wedge2_oriented(n, (i, l), (l, j), &neg)?
        } else {
            Transvection::wedge2_oriented(n, (l, i), (j, l), &neg)?
        };
        out.push(t);
    }
    for m in hi + 1..=n {
        out.push(Transvection::wedge2_oriented(n, (i, m), (j, m), xi)?);
    }
    Ok(out)
}

/// Every reordering is checked up to this many factors; beyond it the
/// identity and reversed orders are checked, which together with pairwise
/// commutation already pins down every order.
const MAX_PERMUTED_FACTORS: usize = 6;

/// Checks that the factors multiply to `∧²t_{i,j}(ξ)` in any order and
/// commute pairwise.
pub fn verify_decomposition(n: usize, i: usize, j: usize, xi: &Scalar) -> bool {
    let Ok(factors) = decompose_wedge2(n, i, j, xi) else {
        return false;
    };
    let Ok(t) = Transvection::plain(n, i, j, xi.clone()) else {
        return false;
    };
    let Ok(target) = wedge(2, &t.to_matrix()) else {
        return false;
    };
    let ring = xi.ring();
    let idx = Indexing::wedge2(n);
    let orders: Vec<Vec<&Transvection>> = if factors.len() <= MAX_PERMUTED_FACTORS {
        factors.iter().permutations(factors.len()).collect()
    } else {
        vec![factors.iter().collect(), factors.iter().rev().collect()]
    };
    let products_ok = orders.iter().all(|o| product(ring, idx, o) == target);
    let commute = factors
        .iter()
        .tuple_combinations()
        .all(|(a, b)| commutator(a, b).map(|c| c.is_identity()).unwrap_or(false));
    products_ok && commute
}

/// Product of `length` random transvections of `GL_n` drawn from a seeded
/// ChaCha8 stream.
pub fn random_elementary(n: usize, length: usize, ring: RingTag, seed: u64) -> SquareMatrix {
    let mut rng = rng_from_seed(seed);
    let mut m = SquareMatrix::identity(ring, Indexing::Plain(n));
    if n < 2 {
        return m;
    }
    for _ in 0..length {
        let i = rng.random_range(1..=n);
        let mut j = rng.random_range(1..n);
        if j >= i {
            j += 1;
        }
        let xi = random_scalar(&mut rng, ring);
        Transvection::plain(n, i, j, xi)
            .expect("distinct indices in range")
            .apply_right(&mut m);
    }
    m
}
