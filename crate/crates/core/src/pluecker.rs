//! Quadratic forms in the Plücker coordinates `x_{ab}` of `∧²Rⁿ`, the
//! degree-2 part of the Plücker ideal, and the substitution action of
//! `GL_N` on such forms.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::combinat::{pair_partitions, pairs, quads, sign_pairs, CombinatError, Pair, Quad};
use crate::exalg::{Indexing, SquareMatrix};
use crate::scalar::{RingTag, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlueckerError {
    #[error("index {i} occurs in {j:?}")]
    OverlappingIndices { i: usize, j: [usize; 3] },
    #[error("expected a wedge2({expected}) matrix, got {got}")]
    ShapeMismatch { expected: usize, got: Indexing },
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(RingTag, RingTag),
    #[error("malformed quadratic form key {0:?}")]
    Key(String),
    #[error(transparent)]
    Index(#[from] CombinatError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// `Σ b_{I,J} x_I x_J` over unordered pairs `{I, J}` of Plücker coordinates.
///
/// Keys are stored as `(I, J)` with `I ≤ J` in lex order, and zero
/// coefficients are never stored, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadForm {
    n: usize,
    ring: RingTag,
    coeffs: BTreeMap<(Pair, Pair), Scalar>,
}

impl QuadForm {
    pub fn zero(ring: RingTag, n: usize) -> Self {
        QuadForm {
            n,
            ring,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> RingTag {
        self.ring
    }

    fn key(a: Pair, b: Pair) -> (Pair, Pair) {
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn coeff(&self, a: Pair, b: Pair) -> Scalar {
        self.coeffs
            .get(&Self::key(a, b))
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.ring))
    }

    /// Adds `c · x_a x_b`.
    pub fn add_term(&mut self, a: Pair, b: Pair, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let key = Self::key(a, b);
        let sum = match self.coeffs.get(&key) {
            Some(old) => old + c,
            None => c.clone(),
        };
        if sum.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, sum);
        }
    }

    /// Adds `c · x_{a1 a2} x_{b1 b2}` for arbitrary (possibly descending)
    /// index order, folding `x_{ab} = −x_{ba}` into the coefficient.
    /// Terms with a repeated index inside one coordinate vanish.
    pub fn add_oriented(&mut self, a: (usize, usize), b: (usize, usize), c: &Scalar) {
        let (Some((pa, sa)), Some((pb, sb))) = (Pair::oriented(a.0, a.1), Pair::oriented(b.0, b.1))
        else {
            return;
        };
        let c = if sa * sb < 0 { -c } else { c.clone() };
        self.add_term(pa, pb, &c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (Pair, Pair, &Scalar)> {
        self.coeffs.iter().map(|(&(a, b), c)| (a, b, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scaled(&self, c: &Scalar) -> QuadForm {
        let mut out = QuadForm::zero(self.ring, self.n);
        for (a, b, v) in self.terms() {
            out.add_term(a, b, &(v * c));
        }
        out
    }

    pub fn plus(&self, other: &QuadForm) -> Result<QuadForm, PlueckerError> {
        if self.ring != other.ring {
            return Err(PlueckerError::RingMismatch(self.ring, other.ring));
        }
        let mut out = self.clone();
        for (a, b, v) in other.terms() {
            out.add_term(a, b, v);
        }
        Ok(out)
    }

    /// Evaluates the form at a point given in lex pair order.
    pub fn evaluate(&self, x: &[Scalar]) -> Scalar {
        self.terms().fold(Scalar::zero(self.ring), |acc, (a, b, c)| {
            let v = &(c * &x[a.rank(self.n)]) * &x[b.rank(self.n)];
            &acc + &v
        })
    }

    /// `{"I|J": value}` with keys in lex order of `(I, J)`.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .terms()
            .map(|(a, b, c)| {
                let key = format!("{}|{}", a.label(self.n), b.label(self.n));
                (key, serde_json::Value::String(c.to_string()))
            })
            .collect();
        serde_json::Value::Object(map)
    }

    pub fn from_json(
        ring: RingTag,
        n: usize,
        value: &serde_json::Value,
    ) -> Result<QuadForm, PlueckerError> {
        let obj = value
            .as_object()
            .ok_or_else(|| PlueckerError::Key(value.to_string()))?;
        let mut out = QuadForm::zero(ring, n);
        for (k, v) in obj {
            let (a, b) = k.split_once('|').ok_or_else(|| PlueckerError::Key(k.clone()))?;
            let text = v.as_str().ok_or_else(|| PlueckerError::Key(k.clone()))?;
            out.add_term(Pair::parse(a, n)?, Pair::parse(b, n)?, &Scalar::parse(ring, text)?);
        }
        Ok(out)
    }
}

/// `f_{i,J}(x) = Σ_h (−1)^h x_{i j_h} x_{J∖j_h}` for `J = (j_1 < j_2 < j_3)`.
pub fn plucker_poly(
    ring: RingTag,
    n: usize,
    i: usize,
    j: [usize; 3],
) -> Result<QuadForm, PlueckerError> {
    crate::combinat::IndexSet::new(j.to_vec(), n)?;
    if !(1..=n).contains(&i) {
        return Err(CombinatError::InvalidIndexSet { elems: vec![i], n }.into());
    }
    if j.contains(&i) {
        return Err(PlueckerError::OverlappingIndices { i, j });
    }
    let mut f = QuadForm::zero(ring, n);
    for h in 0..3 {
        // (−1)^h with 1-based h.
        let sign = Scalar::from_i64(ring, if h % 2 == 0 { -1 } else { 1 });
        let rest: Vec<usize> = j.iter().copied().filter(|&e| e != j[h]).collect();
        f.add_oriented((i, j[h]), (rest[0], rest[1]), &sign);
    }
    Ok(f)
}

/// The canonical generator `f_{i,{j,k,l}}` for `H = {i < j < k < l}`.
pub fn canonical_form(ring: RingTag, n: usize, h: Quad) -> QuadForm {
    let [i, j, k, l] = h.elems();
    plucker_poly(ring, n, i, [j, k, l]).expect("valid quad")
}

/// `{f_H : H ∈ ∧⁴[n]}` in lex order; empty for `n < 4`.
pub fn canonical_basis(ring: RingTag, n: usize) -> Vec<QuadForm> {
    quads(n).into_iter().map(|h| canonical_form(ring, n, h)).collect()
}

/// Coordinates of a form in the canonical basis: `b = Σ_S θ_S f_S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaVector {
    pub ring: RingTag,
    pub n: usize,
    values: BTreeMap<Quad, Scalar>,
}

impl ThetaVector {
    pub fn new(ring: RingTag, n: usize) -> Self {
        ThetaVector {
            ring,
            n,
            values: BTreeMap::new(),
        }
    }

    pub fn get(&self, s: Quad) -> Scalar {
        self.values
            .get(&s)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.ring))
    }

    pub fn set(&mut self, s: Quad, value: Scalar) {
        if value.is_zero() {
            self.values.remove(&s);
        } else {
            self.values.insert(s, value);
        }
    }

    /// Nonzero entries in lex order.
    pub fn iter(&self) -> impl Iterator<Item = (Quad, &Scalar)> {
        self.values.iter().map(|(q, v)| (*q, v))
    }

    /// `Σ_S θ_S f_S`.
    pub fn combine(&self) -> QuadForm {
        let mut out = QuadForm::zero(self.ring, self.n);
        for (s, theta) in self.iter() {
            for (a, b, c) in canonical_form(self.ring, self.n, s).terms() {
                out.add_term(a, b, &(c * theta));
            }
        }
        out
    }
}

/// Why a form is outside the degree-2 part of the ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdealViolation {
    /// A coefficient on overlapping coordinates is nonzero.
    Overlap { a: Pair, b: Pair, value: Scalar },
    /// Two splits of the same quad carry different signed coefficients.
    Inconsistent {
        quad: Quad,
        first: (Pair, Pair),
        second: (Pair, Pair),
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdealMembership {
    Member(ThetaVector),
    NonMember(IdealViolation),
}

impl IdealMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, IdealMembership::Member(_))
    }

    pub fn theta(&self) -> Option<&ThetaVector> {
        match self {
            IdealMembership::Member(t) => Some(t),
            IdealMembership::NonMember(_) => None,
        }
    }
}

/// Decides whether `b` lies in the span of the canonical basis and, if so,
/// returns its coordinates.
///
/// The canonical form carries coefficient `−sign(I, J)` on `x_I x_J`, so the
/// coordinate is `θ_S = −sign(I, J) · b_{I,J}`, which must agree over the
/// three splits of `S`.
pub fn in_ideal(b: &QuadForm) -> IdealMembership {
    let ring = b.ring;
    for (a, c, v) in b.terms() {
        if a.meets(c) {
            return IdealMembership::NonMember(IdealViolation::Overlap {
                a,
                b: c,
                value: v.clone(),
            });
        }
    }
    let mut theta = ThetaVector::new(ring, b.n);
    for s in quads(b.n) {
        let parts = pair_partitions(s);
        let signed = |k: usize| {
            let p = parts[k];
            let c = b.coeff(p.b, p.d);
            if p.sign > 0 {
                -c
            } else {
                c
            }
        };
        let first = signed(0);
        for k in 1..3 {
            if signed(k) != first {
                return IdealMembership::NonMember(IdealViolation::Inconsistent {
                    quad: s,
                    first: (parts[0].b, parts[0].d),
                    second: (parts[k].b, parts[k].d),
                });
            }
        }
        theta.set(s, first);
    }
    IdealMembership::Member(theta)
}

/// Substitutes `x_P ↦ Σ_A g_{A,P} x_A` into `f`: each term `c · x_P x_Q`
/// contributes `c · g_{A,P} g_{C,Q}` to the monomial `x_A x_C` for every
/// ordered `(A, C)`.
pub fn act(g: &SquareMatrix, f: &QuadForm) -> Result<QuadForm, PlueckerError> {
    if g.indexing() != Indexing::wedge2(f.n) {
        return Err(PlueckerError::ShapeMismatch {
            expected: f.n,
            got: g.indexing(),
        });
    }
    if g.ring() != f.ring {
        return Err(PlueckerError::RingMismatch(g.ring(), f.ring));
    }
    let all = pairs(f.n);
    let mut out = QuadForm::zero(f.ring, f.n);
    for (p, q, c) in f.terms() {
        let (pc, qc) = (p.rank(f.n), q.rank(f.n));
        for (ra, &a) in all.iter().enumerate() {
            let gap = g.get(ra, pc);
            if gap.is_zero() {
                continue;
            }
            let left = c * gap;
            for (rc, &cc) in all.iter().enumerate() {
                let gcq = g.get(rc, qc);
                if !gcq.is_zero() {
                    out.add_term(a, cc, &(&left * gcq));
                }
            }
        }
    }
    Ok(out)
}

/// Sign with which `x_I x_J` appears in the canonical form of `I ⊔ J`.
pub fn canonical_sign(a: Pair, b: Pair) -> i8 {
    -sign_pairs(a, b)
}
