//! Seeded invariant suites behind the `selftest` command.

use std::fmt::Write as _;

use rand::Rng;

use crate::combinat::{pairs, quads, sign_pairs, Pair, Quad};
use crate::diagram::diagram_exterior_number;
use crate::exalg::{wedge, Indexing, SquareMatrix};
use crate::pluecker::{act, canonical_basis, in_ideal};
use crate::random::{random_invertible, random_member, random_scalar, rng_from_seed, TestRng, PRNG_ID};
use crate::scalar::{RingTag, Scalar};
use crate::scheme::{
    congruence_membership, exterior_number, membership, second_form_membership, theta_from_minors,
    transvection_ext_numbers, ExtNumberKey, MembershipOptions, ViolationKind,
};
use crate::transvect::{verify_decomposition, Transvection};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    fn as_str(self) -> &'static str {
        match self {
            Level::Quick => "quick",
            Level::Full => "full",
        }
    }

    fn max_n(self) -> usize {
        match self {
            Level::Quick => 6,
            Level::Full => 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    /// `None` on success, otherwise the first counterexample.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelftestReport {
    pub level: Level,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failure.is_none())
    }

    pub fn failed_names(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| c.failure.is_some())
            .map(|c| c.name)
            .collect()
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "selftest level={} seed={} prng={}",
            self.level.as_str(),
            self.seed,
            PRNG_ID
        );
        for c in &self.checks {
            match &c.failure {
                None => {
                    let _ = writeln!(out, "PASS {}", c.name);
                }
                Some(why) => {
                    let _ = writeln!(out, "FAIL {}: {why}", c.name);
                }
            }
        }
        let ok = self.checks.len() - self.failed_names().len();
        let _ = writeln!(out, "{ok}/{} checks passed", self.checks.len());
        out
    }
}

type Check = fn(&mut TestRng, Level) -> Result<(), String>;

const F97: RingTag = RingTag::IntegersMod(97);

fn ensure(cond: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why())
    }
}

fn ring_axioms(rng: &mut TestRng, _: Level) -> Result<(), String> {
    for ring in [RingTag::Integers, RingTag::Rationals, F97, RingTag::IntegersMod(12)] {
        for _ in 0..200 {
            let [a, b, c] = [0; 3].map(|_| random_scalar(rng, ring));
            ensure(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), || {
                format!("distributivity over {ring}: {a}, {b}, {c}")
            })?;
            ensure(&(&a * &b) * &c == &a * &(&b * &c), || {
                format!("associativity over {ring}: {a}, {b}, {c}")
            })?;
            if a.is_unit() {
                let inv = a.inv().map_err(|e| e.to_string())?;
                ensure((&a * &inv).is_one(), || format!("inverse of {a} over {ring}"))?;
            }
        }
    }
    Ok(())
}

fn cauchy_binet(rng: &mut TestRng, level: Level) -> Result<(), String> {
    for n in 4..=level.max_n().min(7) {
        for _ in 0..10 {
            let x = crate::random::random_matrix(rng, F97, Indexing::Plain(n));
            let y = crate::random::random_matrix(rng, F97, Indexing::Plain(n));
            let xy = x.matmul(&y).map_err(|e| e.to_string())?;
            for m in [2, 4] {
                let lhs = wedge(m, &xy).map_err(|e| e.to_string())?;
                let rhs = wedge(m, &x)
                    .and_then(|a| a.matmul(&wedge(m, &y)?))
                    .map_err(|e| e.to_string())?;
                ensure(lhs == rhs, || format!("wedge({m}) not multiplicative at n = {n}"))?;
            }
        }
    }
    Ok(())
}

fn theta_oracle(rng: &mut TestRng, level: Level) -> Result<(), String> {
    for n in 4..=level.max_n() {
        for _ in 0..3 {
            let (x, g) = random_member(rng, F97, n);
            let report = membership(&g).map_err(|e| e.to_string())?;
            ensure(report.accepted(), || format!("wedged member rejected at n = {n}"))?;
            let expect = theta_from_minors(&x).map_err(|e| e.to_string())?;
            ensure(report.theta.as_ref() == Some(&expect), || {
                format!("θ differs from fourth-order minors at n = {n}")
            })?;
        }
    }
    Ok(())
}

fn perturbed_identity(ring: RingTag, n: usize, xi: i64) -> SquareMatrix {
    let mut g = SquareMatrix::identity(ring, Indexing::wedge2(n));
    let a = Pair::new(1, 2, n).expect("n >= 4");
    let b = Pair::new(3, 4, n).expect("n >= 4");
    g.set(a.rank(n), b.rank(n), Scalar::from_i64(ring, xi));
    g
}

fn rejection(rng: &mut TestRng, level: Level) -> Result<(), String> {
    for n in 4..=level.max_n() {
        let xi = rng.random_range(1..97);
        let g = perturbed_identity(F97, n, xi);
        let report = membership(&g).map_err(|e| e.to_string())?;
        let v = report.violation.ok_or_else(|| format!("perturbed identity accepted at n = {n}"))?;
        let key = ExtNumberKey {
            a: Pair::new(1, 2, n).expect("valid"),
            c: Pair::new(1, 2, n).expect("valid"),
            h: Quad::new([1, 2, 3, 4], n).expect("valid"),
        };
        ensure(
            v.kind == ViolationKind::ZeroConstraint
                && v.key == key
                && v.value == Scalar::from_i64(F97, 2 * xi),
            || format!("unexpected violation {v:?}"),
        )?;
    }
    Ok(())
}

fn oracle_equivalence(rng: &mut TestRng, level: Level) -> Result<(), String> {
    for n in 4..=level.max_n() {
        let g = crate::random::random_matrix(rng, F97, Indexing::wedge2(n));
        let ps = pairs(n);
        let qs = quads(n);
        let check = |a: Pair, c: Pair, h: Quad| -> Result<(), String> {
            let direct = exterior_number(&g, a, c, h).map_err(|e| e.to_string())?;
            let diag = diagram_exterior_number(&g, a, c, h).map_err(|e| e.to_string())?;
            ensure(direct == diag, || {
                format!("diagram and direct routes differ at A={a} C={c} H={h}")
            })
        };
        if n <= 6 {
            for &h in &qs {
                for &a in &ps {
                    for &c in &ps {
                        check(a, c, h)?;
                    }
                }
            }
        } else {
            for _ in 0..1000 {
                let a = ps[rng.random_range(0..ps.len())];
                let c = ps[rng.random_range(0..ps.len())];
                let h = qs[rng.random_range(0..qs.len())];
                check(a, c, h)?;
            }
        }
    }
    Ok(())
}

fn decomposition(_: &mut TestRng, level: Level) -> Result<(), String> {
    for n in 3..=level.max_n().min(7) {
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                for xi in [1, 3] {
                    let xi = Scalar::from_i64(RingTag::Integers, xi);
                    ensure(verify_decomposition(n, i, j, &xi), || {
                        format!("decomposition of t_{{{i},{j}}}({xi}) fails at n = {n}")
                    })?;
                }
            }
        }
    }
    Ok(())
}

fn closed_form(_: &mut TestRng, level: Level) -> Result<(), String> {
    let top = if level == Level::Full { 5 } else { 4 };
    for n in 4..=top {
        for i in 1..=n {
            for j in (1..=n).filter(|&j| j != i) {
                for xi in [1, 2, 5] {
                    let xi = Scalar::from_i64(RingTag::Integers, xi);
                    let t = Transvection::plain(n, i, j, xi.clone()).map_err(|e| e.to_string())?;
                    let g = wedge(2, &t.to_matrix()).map_err(|e| e.to_string())?;
                    for h in quads(n) {
                        for a in pairs(n) {
                            for c in pairs(n) {
                                let direct = exterior_number(&g, a, c, h).map_err(|e| e.to_string())?;
                                let closed = transvection_ext_numbers(n, i, j, &xi, a, c, h)
                                    .map_err(|e| e.to_string())?;
                                ensure(direct == closed, || {
                                    format!("t_{{{i},{j}}}({xi}) at A={a} C={c} H={h}")
                                })?;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn multiplicativity(rng: &mut TestRng, level: Level) -> Result<(), String> {
    let n = if level == Level::Full { 6 } else { 5 };
    let (_, g) = random_member(rng, F97, n);
    let (_, h) = random_member(rng, F97, n);
    let tg = membership(&g).map_err(|e| e.to_string())?.theta.ok_or("g rejected")?;
    let th = membership(&h).map_err(|e| e.to_string())?.theta.ok_or("h rejected")?;
    let gh = g.matmul(&h).map_err(|e| e.to_string())?;
    let qs = quads(n);
    let ps = pairs(n);
    for _ in 0..200 {
        let a = ps[rng.random_range(0..ps.len())];
        let c = ps[rng.random_range(0..ps.len())];
        let hq = qs[rng.random_range(0..qs.len())];
        let direct = exterior_number(&gh, a, c, hq).map_err(|e| e.to_string())?;
        let expect = match a.union(c) {
            None => Scalar::zero(F97),
            Some(s) => {
                let mut acc = Scalar::zero(F97);
                for &i in &qs {
                    acc = &acc + &(th.get(i, hq) * tg.get(s, i));
                }
                &Scalar::from_sign(F97, sign_pairs(a, c)) * &acc
            }
        };
        ensure(direct == expect, || format!("a(gh) at A={a} C={c} H={hq}"))?;
    }
    Ok(())
}

fn plucker_stability(rng: &mut TestRng, level: Level) -> Result<(), String> {
    for n in 4..=level.max_n().min(6) {
        let basis = canonical_basis(F97, n);
        for _ in 0..2 {
            let (_, g) = random_member(rng, F97, n);
            for f in &basis {
                let moved = act(&g, f).map_err(|e| e.to_string())?;
                ensure(in_ideal(&moved).is_member(), || {
                    format!("act(∧²x, f) left the ideal at n = {n}")
                })?;
            }
        }
    }
    Ok(())
}

fn second_form_agreement(rng: &mut TestRng, level: Level) -> Result<(), String> {
    let n = if level == Level::Full { 5 } else { 4 };
    for k in 0..10 {
        let (_, mut g) = random_member(rng, F97, n);
        if k % 2 == 1 {
            let (r, c) = (rng.random_range(0..g.side()), rng.random_range(0..g.side()));
            let bumped = g.get(r, c) + &Scalar::one(F97);
            g.set(r, c, bumped);
            if !g.is_invertible() {
                continue;
            }
        }
        let first = membership(&g).map_err(|e| e.to_string())?.accepted();
        let second = second_form_membership(&g).map_err(|e| e.to_string())?.accepted();
        ensure(first == second, || {
            format!("membership says {first}, second form says {second}")
        })?;
    }
    Ok(())
}

fn congruence_coherence(rng: &mut TestRng, _: Level) -> Result<(), String> {
    let n = 4;
    for _ in 0..3 {
        let x = random_invertible(rng, RingTag::Integers, n);
        let g = wedge(2, &x).map_err(|e| e.to_string())?;
        ensure(membership(&g).map_err(|e| e.to_string())?.accepted(), || {
            "integral member rejected".to_string()
        })?;
        for m in [2, 3, 4, 6, 97] {
            let r = congruence_membership(&g, m, &MembershipOptions::default())
                .map_err(|e| e.to_string())?;
            ensure(r.accepted(), || format!("member rejected modulo {m}"))?;
        }
    }
    Ok(())
}

const CHECKS: &[(&str, Check)] = &[
    ("ring-axioms", ring_axioms),
    ("cauchy-binet", cauchy_binet),
    ("theta-oracle", theta_oracle),
    ("rejection-certificate", rejection),
    ("oracle-equivalence", oracle_equivalence),
    ("transvection-decomposition", decomposition),
    ("transvection-closed-form", closed_form),
    ("multiplicativity", multiplicativity),
    ("plucker-stability", plucker_stability),
    ("second-form-agreement", second_form_agreement),
    ("congruence-coherence", congruence_coherence),
];

/// Runs every suite; each draws from its own stream derived from `seed`.
pub fn run_selftest(level: Level, seed: u64) -> SelftestReport {
    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(k, (name, check))| {
            let mut rng = rng_from_seed(seed.wrapping_add(k as u64));
            CheckResult {
                name,
                failure: check(&mut rng, level).err(),
            }
        })
        .collect();
    SelftestReport { level, seed, checks }
}
