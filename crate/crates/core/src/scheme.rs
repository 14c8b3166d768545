//! Exterior numbers and the equations cutting out `∧²GL_n` inside `GL_N`.
//!
//! For `g ∈ GL_N` (rows and columns indexed by pairs) the exterior numbers are
//!
//! ```text
//! a^H_{A,C}(g) = Σ_{B ⊔ D = H} sign(B, D) · g_{A,B} · g_{C,D}
//! ```
//!
//! summed over the six ordered splits of the 4-set `H`. `g` is a point of the
//! scheme iff every `a^H_{A,C}` with `A ∩ C ≠ ∅` vanishes and
//! `sign(A, C) · a^H_{A,C}` depends only on `(A ∪ C, H)`. That common value is
//! the θ-table entry `θ^H_{A∪C}`; for `g = ∧²x` it is the 4×4 minor
//! `M^H_{A∪C}(x)`.

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::combinat::{pairs, quads, sign_pairs, CombinatError, Pair, Quad};
use crate::exalg::{wedge, Indexing, MatrixError, SquareMatrix};
use crate::scalar::{RingTag, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("matrix is not invertible modulo {0}")]
    NotInvertibleModulo(u64),
    #[error("invalid modulus {0}: must be at least 2")]
    InvalidModulus(u64),
    #[error("unsupported ring {0} (need a field or ℤ)")]
    UnsupportedRing(RingTag),
    #[error("expected a wedge2 matrix, got {0}")]
    NotWedge2(Indexing),
    #[error("shape mismatch: θ-tables for n = {0} and n = {1}")]
    ShapeMismatch(usize, usize),
    #[error(transparent)]
    Index(#[from] CombinatError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// The index triple `(A, C, H)` of an exterior number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtNumberKey {
    pub a: Pair,
    pub c: Pair,
    pub h: Quad,
}

impl ExtNumberKey {
    fn to_json(self, n: usize) -> Value {
        json!({ "A": self.a.label(n), "C": self.c.label(n), "H": self.h.label(n) })
    }
}

fn wedge2_rank(g: &SquareMatrix) -> Result<usize, SchemeError> {
    match g.indexing() {
        Indexing::Wedge { m: 2, n } => Ok(n),
        other => Err(SchemeError::NotWedge2(other)),
    }
}

fn check_indices(n: usize, a: Pair, c: Pair, h: Quad) -> Result<(), SchemeError> {
    for p in [a, c] {
        Pair::new(p.lo(), p.hi(), n)?;
    }
    Quad::new(h.elems(), n)?;
    Ok(())
}

/// `a^H_{A,C}(g)`, summed over the six ordered splits `H = B ⊔ D`.
pub fn exterior_number(g: &SquareMatrix, a: Pair, c: Pair, h: Quad) -> Result<Scalar, SchemeError> {
    let n = wedge2_rank(g)?;
    check_indices(n, a, c, h)?;
    let (ra, rc) = (a.rank(n), c.rank(n));
    let mut acc = Scalar::zero(g.ring());
    for b in h.pairs() {
        let d = h.complement(b).expect("b inside h");
        let term = g.get(ra, b.rank(n)) * g.get(rc, d.rank(n));
        acc = match sign_pairs(b, d) {
            1 => &acc + &term,
            _ => &acc - &term,
        };
    }
    Ok(acc)
}

/// `θ^H_S` stored as a `C(n,4) × C(n,4)` matrix with row `S`, column `H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaTable(SquareMatrix);

impl ThetaTable {
    pub fn from_matrix(m: SquareMatrix) -> Result<Self, SchemeError> {
        match m.indexing() {
            Indexing::Wedge { m: 4, .. } => Ok(ThetaTable(m)),
            other => Err(MatrixError::WrongIndexing {
                expected: "wedge4",
                got: other,
            }
            .into()),
        }
    }

    /// `θ^H_S = δ_{S,H}`.
    pub fn identity(ring: RingTag, n: usize) -> Self {
        ThetaTable(SquareMatrix::identity(ring, Indexing::wedge4(n)))
    }

    pub fn n(&self) -> usize {
        self.0.indexing().base_rank()
    }

    pub fn ring(&self) -> RingTag {
        self.0.ring()
    }

    pub fn get(&self, s: Quad, h: Quad) -> &Scalar {
        let n = self.n();
        self.0.get(s.rank(n), h.rank(n))
    }

    pub fn as_matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn determinant(&self) -> Scalar {
        self.0.determinant()
    }

    /// Nonzero entries as `{"S|H": value}` in lex order of `(S, H)`.
    pub fn to_json(&self) -> Value {
        let n = self.n();
        let qs = quads(n);
        let mut map = Map::new();
        for (r, s) in qs.iter().enumerate() {
            for (c, h) in qs.iter().enumerate() {
                let v = self.0.get(r, c);
                if !v.is_zero() {
                    map.insert(format!("{}|{}", s.label(n), h.label(n)), json!(v.to_string()));
                }
            }
        }
        Value::Object(map)
    }
}

/// `θ^H_S(∧²x) = M^H_S(x)`, the fourth compound of `x`.
pub fn theta_from_minors(x: &SquareMatrix) -> Result<ThetaTable, SchemeError> {
    let n = match x.indexing() {
        Indexing::Plain(n) => n,
        other => {
            return Err(MatrixError::WrongIndexing {
                expected: "plain",
                got: other,
            }
            .into())
        }
    };
    if n < 4 {
        return Ok(ThetaTable(SquareMatrix::zeros(x.ring(), Indexing::wedge4(n))));
    }
    Ok(ThetaTable(wedge(4, x)?))
}

/// θ-table of `g·h` from those of `g` and `h`: `Σ_I θ^I_S(g) θ^H_I(h)`.
pub fn theta_compose(g: &ThetaTable, h: &ThetaTable) -> Result<ThetaTable, SchemeError> {
    if g.n() != h.n() {
        return Err(SchemeError::ShapeMismatch(g.n(), h.n()));
    }
    Ok(ThetaTable(g.0.matmul(&h.0)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `a^H_{A,C} ≠ 0` although `A ∩ C ≠ ∅`.
    ZeroConstraint,
    /// `sign(A,C)·a^H_{A,C}` differs from the value at the representative split.
    ConsistencyConstraint,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::ZeroConstraint => "ZeroConstraint",
            ViolationKind::ConsistencyConstraint => "ConsistencyConstraint",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub key: ExtNumberKey,
    /// `a^H_{A,C}` for zero constraints, `sign(A,C)·a^H_{A,C}` otherwise.
    pub value: Scalar,
    /// The representative split the value was compared against.
    pub conflicting_key: Option<ExtNumberKey>,
    pub expected: Option<Scalar>,
}

impl Violation {
    fn to_json(&self, n: usize) -> Value {
        let mut v = json!({
            "kind": self.kind.as_str(),
            "key": self.key.to_json(n),
            "value": self.value.to_string(),
        });
        if let Some(k) = self.conflicting_key {
            v["conflicting_key"] = k.to_json(n);
        }
        if let Some(e) = &self.expected {
            v["expected"] = json!(e.to_string());
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MembershipOptions {
    /// Reject singular input with `NotInvertible` before sweeping.
    pub require_invertible: bool,
    /// Sweep every constraint instead of stopping at the first violation.
    pub full_report: bool,
    /// Split the sweep over `H` across the rayon pool.
    pub parallel: bool,
    /// Record `det θ` on acceptance.
    pub theta_determinant: bool,
}

impl Default for MembershipOptions {
    fn default() -> Self {
        MembershipOptions {
            require_invertible: true,
            full_report: false,
            parallel: false,
            theta_determinant: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipReport {
    pub n: usize,
    pub verdict: Verdict,
    pub theta: Option<ThetaTable>,
    /// First violation in `(H, A, C)` lex order.
    pub violation: Option<Violation>,
    /// Every violation, populated only by a full-report sweep.
    pub all_violations: Vec<Violation>,
    pub theta_determinant: Option<Scalar>,
    /// Set by [`congruence_membership`].
    pub modulus: Option<u64>,
}

impl MembershipReport {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }

    pub fn to_json(&self) -> Value {
        let n = self.n;
        let mut v = json!({
            "verdict": self.verdict.as_str(),
            "theta": self.theta.as_ref().map(ThetaTable::to_json),
            "violation": self.violation.as_ref().map(|x| x.to_json(n)),
        });
        if !self.all_violations.is_empty() {
            v["all_violations"] =
                Value::Array(self.all_violations.iter().map(|x| x.to_json(n)).collect());
        }
        if let Some(d) = &self.theta_determinant {
            v["theta_determinant"] = json!(d.to_string());
        }
        if let Some(m) = self.modulus {
            v["modulus"] = json!(m);
        }
        v
    }
}

/// Sees every checked key, its value, and whether it held.
pub type Observer<'a> = dyn FnMut(&ExtNumberKey, &Scalar, bool) + 'a;

/// Observer for `--trace`.
pub type TraceFn<'a> = &'a mut Observer<'a>;

/// Precomputed pair data shared by all columns of a sweep.
struct SweepTables {
    n: usize,
    pairs: Vec<Pair>,
    quads: Vec<Quad>,
    /// `rank(A ∪ C)` in the quad order, or `usize::MAX` if `A ∩ C ≠ ∅`.
    union_rank: Vec<usize>,
    sign: Vec<i8>,
}

impl SweepTables {
    fn new(n: usize) -> Self {
        let pairs = pairs(n);
        let quads = quads(n);
        let np = pairs.len();
        let mut union_rank = vec![usize::MAX; np * np];
        let mut sign = vec![0i8; np * np];
        for (i, &a) in pairs.iter().enumerate() {
            for (j, &c) in pairs.iter().enumerate() {
                if let Some(q) = a.union(c) {
                    union_rank[i * np + j] = q.rank(n);
                }
                sign[i * np + j] = sign_pairs(a, c);
            }
        }
        SweepTables {
            n,
            pairs,
            quads,
            union_rank,
            sign,
        }
    }
}

struct Column {
    theta: Vec<Scalar>,
    violations: Vec<Violation>,
}

fn sweep_column(
    g: &SquareMatrix,
    t: &SweepTables,
    h: Quad,
    stop_early: bool,
    mut trace: Option<&mut Observer<'_>>,
) -> Column {
    let n = t.n;
    let np = t.pairs.len();
    let ring = g.ring();
    let hp = h.pairs();
    // hp[k] and hp[5 - k] are complementary.
    let split_sign: [i8; 6] = std::array::from_fn(|k| sign_pairs(hp[k], hp[5 - k]));
    let cols: Vec<Vec<Scalar>> = hp
        .iter()
        .map(|p| {
            let c = p.rank(n);
            (0..np).map(|r| g.get(r, c).clone()).collect()
        })
        .collect();

    let mut theta: Vec<Option<Scalar>> = vec![None; t.quads.len()];
    let mut violations = Vec::new();
    'sweep: for ia in 0..np {
        for ic in ia..np {
            let mut val = Scalar::zero(ring);
            for k in 0..6 {
                let x = &cols[k][ia];
                let y = &cols[5 - k][ic];
                if x.is_zero() || y.is_zero() {
                    continue;
                }
                let term = x * y;
                val = if split_sign[k] > 0 { &val + &term } else { &val - &term };
            }
            let key = ExtNumberKey {
                a: t.pairs[ia],
                c: t.pairs[ic],
                h,
            };
            let s = t.union_rank[ia * np + ic];
            let violation = if s == usize::MAX {
                (!val.is_zero()).then(|| Violation {
                    kind: ViolationKind::ZeroConstraint,
                    key,
                    value: val.clone(),
                    conflicting_key: None,
                    expected: None,
                })
            } else {
                let signed = if t.sign[ia * np + ic] > 0 { val.clone() } else { -val.clone() };
                match &theta[s] {
                    // The first split visited is the representative (lex-smallest A).
                    None => {
                        theta[s] = Some(signed);
                        None
                    }
                    Some(rep) if *rep == signed => None,
                    Some(rep) => {
                        let [s1, s2, s3, s4] = t.quads[s].elems();
                        Some(Violation {
                            kind: ViolationKind::ConsistencyConstraint,
                            key,
                            value: signed,
                            conflicting_key: Some(ExtNumberKey {
                                a: Pair::new(s1, s2, n).expect("ordered"),
                                c: Pair::new(s3, s4, n).expect("ordered"),
                                h,
                            }),
                            expected: Some(rep.clone()),
                        })
                    }
                }
            };
            if let Some(cb) = trace.as_mut() {
                cb(&key, &val, violation.is_none());
            }
            if let Some(v) = violation {
                violations.push(v);
                if stop_early {
                    break 'sweep;
                }
            }
        }
    }
    Column {
        theta: theta
            .into_iter()
            .map(|v| v.unwrap_or_else(|| Scalar::zero(ring)))
            .collect(),
        violations,
    }
}

/// Decides whether `g` is a point of `∧²GL_n` over its ring.
pub fn membership(g: &SquareMatrix) -> Result<MembershipReport, SchemeError> {
    membership_with(g, &MembershipOptions::default(), None)
}

pub fn membership_with(
    g: &SquareMatrix,
    opts: &MembershipOptions,
    trace: Option<TraceFn<'_>>,
) -> Result<MembershipReport, SchemeError> {
    let n = wedge2_rank(g)?;
    if opts.require_invertible && !g.is_invertible() {
        return Err(SchemeError::NotInvertible);
    }
    Ok(sweep(g, n, opts, trace))
}

fn sweep(
    g: &SquareMatrix,
    n: usize,
    opts: &MembershipOptions,
    mut trace: Option<TraceFn<'_>>,
) -> MembershipReport {
    let t = SweepTables::new(n);
    let stop_early = !opts.full_report;
    let columns: Vec<Column> = if opts.parallel && trace.is_none() {
        t.quads
            .par_iter()
            .map(|&h| sweep_column(g, &t, h, stop_early, None))
            .collect()
    } else {
        let mut out = Vec::with_capacity(t.quads.len());
        for &h in &t.quads {
            let col = sweep_column(g, &t, h, stop_early, trace.as_mut().map(|f| &mut **f as _));
            let failed = !col.violations.is_empty();
            out.push(col);
            if failed && stop_early {
                break;
            }
        }
        out
    };

    let all: Vec<Violation> = columns.iter().flat_map(|c| c.violations.iter().cloned()).collect();
    let ring = g.ring();
    if let Some(first) = all.first().cloned() {
        return MembershipReport {
            n,
            verdict: Verdict::Reject,
            theta: None,
            violation: Some(first),
            all_violations: if opts.full_report { all } else { Vec::new() },
            theta_determinant: None,
            modulus: None,
        };
    }
    let q = t.quads.len();
    let theta = SquareMatrix::from_fn(ring, Indexing::wedge4(n), |s, h| columns[h].theta[s].clone());
    let theta = ThetaTable(theta);
    let theta_determinant = opts.theta_determinant.then(|| {
        if q == 0 {
            Scalar::one(ring)
        } else {
            theta.determinant()
        }
    });
    MembershipReport {
        n,
        verdict: Verdict::Accept,
        theta: Some(theta),
        violation: None,
        all_violations: Vec::new(),
        theta_determinant,
        modulus: None,
    }
}

/// Membership of `g ∈ GL_N(ℤ)` in the preimage of `∧²GL_n(ℤ/m)` under
/// reduction mod `m`: every equation is tested modulo `m`.
pub fn congruence_membership(
    g: &SquareMatrix,
    modulus: u64,
    opts: &MembershipOptions,
) -> Result<MembershipReport, SchemeError> {
    congruence_membership_with(g, modulus, opts, None)
}

pub fn congruence_membership_with(
    g: &SquareMatrix,
    modulus: u64,
    opts: &MembershipOptions,
    trace: Option<TraceFn<'_>>,
) -> Result<MembershipReport, SchemeError> {
    if g.ring() != RingTag::Integers {
        return Err(SchemeError::UnsupportedRing(g.ring()));
    }
    if modulus < 2 {
        return Err(SchemeError::InvalidModulus(modulus));
    }
    let n = wedge2_rank(g)?;
    let reduced = g.convert(RingTag::modulo(modulus)?)?;
    if opts.require_invertible && !reduced.is_invertible() {
        return Err(SchemeError::NotInvertibleModulo(modulus));
    }
    let mut report = sweep(&reduced, n, opts, trace);
    report.modulus = Some(modulus);
    Ok(report)
}

/// `(∧²t_{i,j}(ξ))_{L,M}` without building the matrix: `1` on the diagonal,
/// `±ξ` at `L = {i,k}`, `M = {j,k}`, zero elsewhere. The sign is `+` iff `i`
/// and `j` sit on the same side of `k`.
pub fn wedged_transvection_entry(i: usize, j: usize, xi: &Scalar, l: Pair, m: Pair) -> Scalar {
    let ring = xi.ring();
    if l == m {
        return Scalar::one(ring);
    }
    match (l.partner(i), l.contains(j)) {
        (Some(k), false) if l.substitute(i, j) == Some(m) => {
            if (i < k) == (j < k) {
                xi.clone()
            } else {
                -xi.clone()
            }
        }
        _ => Scalar::zero(ring),
    }
}

/// Closed form of `a^H_{A,C}(∧²t_{i,j}(ξ))`.
///
/// Only three splits `(B, D)` can contribute: `(A, C)` itself, `(A, C')`
/// with `C' = C ∖ i ∪ j`, and `(A', C)` with `A' = A ∖ i ∪ j`. When both
/// shifted splits fit inside `H` (which forces `A ∩ C = {i}`) their
/// contributions cancel.
pub fn transvection_ext_numbers(
    n: usize,
    i: usize,
    j: usize,
    xi: &Scalar,
    a: Pair,
    c: Pair,
    h: Quad,
) -> Result<Scalar, SchemeError> {
    if i == j || !(1..=n).contains(&i) || !(1..=n).contains(&j) {
        return Err(CombinatError::InvalidIndexSet {
            elems: vec![i, j],
            n,
        }
        .into());
    }
    check_indices(n, a, c, h)?;
    let ring = xi.ring();
    if a.union(c) == Some(h) {
        return Ok(Scalar::from_sign(ring, sign_pairs(a, c)));
    }
    let mut acc = Scalar::zero(ring);
    if let Some(c2) = c.substitute(i, j).filter(|_| !c.contains(j)) {
        if a.union(c2) == Some(h) {
            let entry = wedged_transvection_entry(i, j, xi, c, c2);
            acc = &acc + &(&Scalar::from_sign(ring, sign_pairs(a, c2)) * &entry);
        }
    }
    if let Some(a2) = a.substitute(i, j).filter(|_| !a.contains(j)) {
        if a2.union(c) == Some(h) {
            let entry = wedged_transvection_entry(i, j, xi, a, a2);
            acc = &acc + &(&Scalar::from_sign(ring, sign_pairs(a2, c)) * &entry);
        }
    }
    Ok(acc)
}

/// The symmetric Gram matrix `B_I` with `(B_I)_{M,L} = sign(M, L)` when
/// `M ⊔ L = I`. Note `xᵗ B_I x = −2 f_I(x)` for the canonical form `f_I`.
pub fn b_matrix(ring: RingTag, n: usize, quad: Quad) -> Result<SquareMatrix, SchemeError> {
    Quad::new(quad.elems(), n)?;
    let mut b = SquareMatrix::zeros(ring, Indexing::wedge2(n));
    for m in quad.pairs() {
        let l = quad.complement(m).expect("m inside quad");
        b.set(m.rank(n), l.rank(n), Scalar::from_sign(ring, sign_pairs(m, l)));
    }
    Ok(b)
}

/// Outcome of the second equation system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecondFormReport {
    pub n: usize,
    pub verdict: Verdict,
    /// Row `I`, column `J` holds `α^I_J`.
    pub alpha: Option<SquareMatrix>,
    /// First `I` whose system had no (integral, over ℤ) solution.
    pub failed_quad: Option<Quad>,
}

impl SecondFormReport {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }

    pub fn to_json(&self) -> Value {
        let n = self.n;
        let alpha = self.alpha.as_ref().map(|a| {
            let qs = quads(n);
            let mut map = Map::new();
            for (r, i) in qs.iter().enumerate() {
                for (c, j) in qs.iter().enumerate() {
                    let v = a.get(r, c);
                    if !v.is_zero() {
                        map.insert(format!("{}|{}", i.label(n), j.label(n)), json!(v.to_string()));
                    }
                }
            }
            Value::Object(map)
        });
        json!({
            "verdict": self.verdict.as_str(),
            "alpha": alpha,
            "failed_quad": self.failed_quad.map(|q| q.label(n)),
        })
    }
}

/// Solves `gᵗ B_I = Σ_J α^I_J B_J g⁻¹` for every quad `I`.
///
/// Runs over a field (ℚ, ℤ/p). Integer input is solved over ℚ and accepted
/// only when every `α` is integral.
pub fn second_form_membership(g: &SquareMatrix) -> Result<SecondFormReport, SchemeError> {
    let n = wedge2_rank(g)?;
    let ring = g.ring();
    let work = match ring {
        RingTag::Integers => g.convert(RingTag::Rationals)?,
        r if r.is_field() => g.clone(),
        r => return Err(SchemeError::UnsupportedRing(r)),
    };
    let field = work.ring();
    let ginv = work.inverse().map_err(|e| match e {
        MatrixError::NotInvertible => SchemeError::NotInvertible,
        other => other.into(),
    })?;
    if ring == RingTag::Integers && !g.is_invertible() {
        return Err(SchemeError::NotInvertible);
    }

    let qs = quads(n);
    let np = crate::combinat::binomial(n, 2);
    let nq = qs.len();
    let zero = Scalar::zero(field);
    // Augmented system: N² rows, nq unknown columns, then nq right-hand sides.
    let width = 2 * nq;
    let mut rows: Vec<Vec<Scalar>> = vec![vec![zero.clone(); width]; np * np];
    for (jq, &q) in qs.iter().enumerate() {
        for m in q.pairs() {
            let l = q.complement(m).expect("inside");
            let s = Scalar::from_sign(field, sign_pairs(m, l));
            let (rm, rl) = (m.rank(n), l.rank(n));
            for c in 0..np {
                // (B_J g⁻¹)_{m,c} = sign(m, l) · g⁻¹_{l,c}
                let v = &s * ginv.get(rl, c);
                rows[rm * np + c][jq] = v;
                // (gᵗ B_I)_{r,m} = g_{l,r} · sign(l, m)
                let w = &s * work.get(rl, c);
                rows[c * np + rm][nq + jq] = w;
            }
        }
    }

    // Row-reduce the coefficient block, carrying the right-hand sides along.
    let mut pivot_of = vec![None; nq];
    let mut next = 0;
    for col in 0..nq {
        let Some(p) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(p, next);
        let inv = rows[next][col].inv()?;
        for v in rows[next].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        pivot_of[col] = Some(next);
        next += 1;
    }

    let mut alpha = SquareMatrix::zeros(ring, Indexing::wedge4(n));
    for (iq, &q) in qs.iter().enumerate() {
        let rhs = nq + iq;
        let consistent = rows[next..].iter().all(|row| row[rhs].is_zero());
        let values: Option<Vec<Scalar>> = consistent
            .then(|| {
                (0..nq)
                    .map(|jq| match pivot_of[jq] {
                        Some(r) => rows[r][rhs].convert(ring).ok(),
                        // A free unknown: the B_J g⁻¹ are independent, so unreachable
                        // for invertible g, but treat it as zero.
                        None => Some(Scalar::zero(ring)),
                    })
                    .collect()
            })
            .flatten();
        match values {
            Some(vals) => {
                for (jq, v) in vals.into_iter().enumerate() {
                    alpha.set(iq, jq, v);
                }
            }
            None => {
                return Ok(SecondFormReport {
                    n,
                    verdict: Verdict::Reject,
                    alpha: None,
                    failed_quad: Some(q),
                })
            }
        }
    }
    Ok(SecondFormReport {
        n,
        verdict: Verdict::Accept,
        alpha: Some(alpha),
        failed_quad: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const F97: RingTag = RingTag::IntegersMod(97);

    fn p(a: usize, b: usize) -> Pair {
        Pair::new(a, b, 9).unwrap()
    }

    fn q(e: [usize; 4]) -> Quad {
        Quad::new(e, 9).unwrap()
    }

    fn perturbed_identity(ring: RingTag, n: usize, xi: i64) -> SquareMatrix {
        let mut g = SquareMatrix::identity(ring, Indexing::wedge2(n));
        g.set(p(1, 2).rank(n), p(3, 4).rank(n), Scalar::from_i64(ring, xi));
        g
    }

    #[test]
    fn identity_exterior_numbers() {
        let n = 5;
        let id = SquareMatrix::identity(F97, Indexing::wedge2(n));
        for h in quads(n) {
            for a in pairs(n) {
                for c in pairs(n) {
                    let expect = if a.union(c) == Some(h) { sign_pairs(a, c) } else { 0 };
                    assert_eq!(
                        exterior_number(&id, a, c, h).unwrap(),
                        Scalar::from_sign(F97, expect)
                    );
                }
            }
        }
    }

    #[test]
    fn perturbed_identity_value() {
        let g = perturbed_identity(F97, 4, 7);
        let v = exterior_number(&g, p(1, 2), p(1, 2), q([1, 2, 3, 4])).unwrap();
        assert_eq!(v, Scalar::from_i64(F97, 14));
    }

    #[test]
    fn rejection_reports_first_key() {
        let g = perturbed_identity(F97, 5, 1);
        let report = membership(&g).unwrap();
        assert_eq!(report.verdict, Verdict::Reject);
        let v = report.violation.unwrap();
        assert_eq!(v.kind, ViolationKind::ZeroConstraint);
        assert_eq!(v.key, ExtNumberKey { a: p(1, 2), c: p(1, 2), h: q([1, 2, 3, 4]) });
        assert_eq!(v.value, Scalar::from_i64(F97, 2));
    }

    #[test]
    fn full_report_collects_everything() {
        let mut rng = crate::random::rng_from_seed(3);
        let g = crate::random::random_matrix(&mut rng, F97, Indexing::wedge2(5));
        let opts = MembershipOptions {
            require_invertible: false,
            full_report: true,
            ..Default::default()
        };
        let report = membership_with(&g, &opts, None).unwrap();
        assert!(report.all_violations.len() > 1);
        assert_eq!(report.violation.as_ref(), report.all_violations.first());
        let par = membership_with(&g, &MembershipOptions { parallel: true, ..opts }, None).unwrap();
        assert_eq!(par, report);
    }

    #[test]
    fn consistency_violation() {
        // Scale one row of the identity: the three splits of 1234 disagree.
        let n = 4;
        let mut g = SquareMatrix::identity(F97, Indexing::wedge2(n));
        g.set(p(1, 3).rank(n), p(1, 3).rank(n), Scalar::from_i64(F97, 2));
        let report = membership(&g).unwrap();
        let v = report.violation.unwrap();
        assert_eq!(v.kind, ViolationKind::ConsistencyConstraint);
        assert_eq!(v.key.a, p(1, 3));
        assert_eq!(v.key.c, p(2, 4));
        assert_eq!(v.conflicting_key.unwrap().a, p(1, 2));
        assert_eq!(v.expected, Some(Scalar::one(F97)));
        assert_eq!(v.value, Scalar::from_i64(F97, 2));
    }

    #[test]
    fn singular_input() {
        let g = SquareMatrix::zeros(F97, Indexing::wedge2(4));
        assert_eq!(membership(&g), Err(SchemeError::NotInvertible));
        let eq_only = MembershipOptions {
            require_invertible: false,
            ..Default::default()
        };
        assert!(membership_with(&g, &eq_only, None).unwrap().accepted());
        let plain = SquareMatrix::identity(F97, Indexing::Plain(6));
        assert!(matches!(membership(&plain), Err(SchemeError::NotWedge2(_))));
    }

    #[test]
    fn congruence_examples() {
        let g = perturbed_identity(RingTag::Integers, 4, 1);
        let opts = MembershipOptions::default();
        assert!(congruence_membership(&g, 2, &opts).unwrap().accepted());
        assert!(!congruence_membership(&g, 3, &opts).unwrap().accepted());
        assert_eq!(
            congruence_membership(&g, 1, &opts),
            Err(SchemeError::InvalidModulus(1))
        );
        let g3 = perturbed_identity(RingTag::Integers, 4, 3);
        assert!(congruence_membership(&g3, 6, &opts).unwrap().accepted());
        let over_f = perturbed_identity(F97, 4, 1);
        assert!(matches!(
            congruence_membership(&over_f, 2, &opts),
            Err(SchemeError::UnsupportedRing(_))
        ));
        let mut singular = SquareMatrix::identity(RingTag::Integers, Indexing::wedge2(4));
        singular.set(0, 0, Scalar::from_i64(RingTag::Integers, 2));
        assert_eq!(
            congruence_membership(&singular, 4, &opts),
            Err(SchemeError::NotInvertibleModulo(4))
        );
    }

    #[test]
    fn b_matrix_shape() {
        let b = b_matrix(F97, 4, q([1, 2, 3, 4])).unwrap();
        let nonzero = b.entries().iter().filter(|e| !e.is_zero()).count();
        assert_eq!(nonzero, 6);
        assert_eq!(b, b.transpose());
        // (12, 34) → +1, (13, 24) → −1
        assert_eq!(b.get(0, 5), &Scalar::one(F97));
        assert_eq!(b.get(1, 4), &Scalar::from_i64(F97, -1));
    }

    #[test]
    fn second_form_on_identity_and_counterexample() {
        let id = SquareMatrix::identity(F97, Indexing::wedge2(5));
        let r = second_form_membership(&id).unwrap();
        assert!(r.accepted());
        assert!(r.alpha.unwrap().is_identity());
        let bad = perturbed_identity(F97, 5, 1);
        assert!(!second_form_membership(&bad).unwrap().accepted());
        let z91 = SquareMatrix::identity(RingTag::IntegersMod(91), Indexing::wedge2(4));
        assert!(matches!(
            second_form_membership(&z91),
            Err(SchemeError::UnsupportedRing(_))
        ));
    }

    #[test]
    fn transvection_entries() {
        let xi = Scalar::from_i64(F97, 5);
        // Middle range of (1): {i,l} → {l,j} carries −ξ.
        assert_eq!(
            wedged_transvection_entry(2, 4, &xi, p(2, 3), p(3, 4)),
            Scalar::from_i64(F97, -5)
        );
        assert_eq!(wedged_transvection_entry(2, 4, &xi, p(1, 2), p(1, 4)), xi);
        assert_eq!(wedged_transvection_entry(2, 4, &xi, p(2, 4), p(2, 4)), Scalar::one(F97));
        assert!(wedged_transvection_entry(2, 4, &xi, p(2, 4), p(4, 5)).is_zero());
    }
}
