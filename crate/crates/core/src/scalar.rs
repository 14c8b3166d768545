//! Exact scalars over the three supported coefficient rings: ℤ, ℚ and ℤ/m.
//!
//! A [`Scalar`] always carries its ring. Values are kept in canonical form
//! (reduced fractions with positive denominator, residues in `[0, m)`), so
//! derived equality is value equality. Mixing rings is an error for the
//! checked operations and a panic for the operator impls, which are meant for
//! code that has already established a common ring (e.g. inside a matrix).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(RingTag, RingTag),
    #[error("{value} is not a unit in {ring}")]
    NotAUnit { value: String, ring: RingTag },
    #[error("invalid modulus {0}: must be at least 2")]
    InvalidModulus(u64),
    #[error("cannot parse {text:?} as an element of {ring}")]
    Parse { text: String, ring: RingTag },
    #[error("cannot parse ring tag {0:?} (expected z, q or zmod:<m>)")]
    RingTag(String),
    #[error("{value} has no image in {ring}")]
    NoReduction { value: String, ring: RingTag },
}

/// The coefficient ring of a scalar or matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingTag {
    Integers,
    Rationals,
    IntegersMod(u64),
}

impl RingTag {
    /// `ℤ/m`, rejecting the zero ring and `ℤ/1`.
    pub fn modulo(m: u64) -> Result<Self, ScalarError> {
        if m < 2 {
            return Err(ScalarError::InvalidModulus(m));
        }
        Ok(RingTag::IntegersMod(m))
    }

    /// True for ℚ and for ℤ/p with p prime.
    pub fn is_field(self) -> bool {
        match self {
            RingTag::Integers => false,
            RingTag::Rationals => true,
            RingTag::IntegersMod(m) => is_prime(m),
        }
    }

    pub fn modulus(self) -> Option<u64> {
        match self {
            RingTag::IntegersMod(m) => Some(m),
            _ => None,
        }
    }
}

impl fmt::Display for RingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingTag::Integers => f.write_str("z"),
            RingTag::Rationals => f.write_str("q"),
            RingTag::IntegersMod(m) => write!(f, "zmod:{m}"),
        }
    }
}

impl FromStr for RingTag {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "z" | "Z" => Ok(RingTag::Integers),
            "q" | "Q" => Ok(RingTag::Rationals),
            other => {
                let m = other
                    .strip_prefix("zmod:")
                    .and_then(|m| m.parse::<u64>().ok())
                    .ok_or_else(|| ScalarError::RingTag(s.to_string()))?;
                RingTag::modulo(m)
            }
        }
    }
}

impl Serialize for RingTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RingTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    Int(BigInt),
    Rat(BigRational),
    Mod { residue: u64, modulus: u64 },
}

/// An exact element of ℤ, ℚ or ℤ/m.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

impl Scalar {
    pub fn zero(ring: RingTag) -> Self {
        Self::from_i64(ring, 0)
    }

    pub fn one(ring: RingTag) -> Self {
        Self::from_i64(ring, 1)
    }

    pub fn from_i64(ring: RingTag, value: i64) -> Self {
        Self::from_bigint(ring, &BigInt::from(value))
    }

    /// Image of `±1` (or `0`) in `ring`.
    pub fn from_sign(ring: RingTag, sign: i8) -> Self {
        Self::from_i64(ring, i64::from(sign))
    }

    pub fn from_bigint(ring: RingTag, value: &BigInt) -> Self {
        match ring {
            RingTag::Integers => Scalar(Repr::Int(value.clone())),
            RingTag::Rationals => Scalar(Repr::Rat(BigRational::from_integer(value.clone()))),
            RingTag::IntegersMod(m) => {
                let r = value.mod_floor(&BigInt::from(m));
                Scalar(Repr::Mod {
                    residue: r.to_u64().expect("residue below a u64 modulus"),
                    modulus: m,
                })
            }
        }
    }

    /// A rational `numer/denom`; fails on a zero denominator.
    pub fn rational(numer: i64, denom: i64) -> Result<Self, ScalarError> {
        if denom == 0 {
            return Err(ScalarError::NotAUnit {
                value: "0".into(),
                ring: RingTag::Rationals,
            });
        }
        Ok(Scalar(Repr::Rat(BigRational::new(numer.into(), denom.into()))))
    }

    pub fn from_rational(value: BigRational) -> Self {
        Scalar(Repr::Rat(value))
    }

    pub fn residue(value: u64, modulus: u64) -> Result<Self, ScalarError> {
        let ring = RingTag::modulo(modulus)?;
        Ok(Self::from_bigint(ring, &BigInt::from(value)))
    }

    pub fn ring(&self) -> RingTag {
        match &self.0 {
            Repr::Int(_) => RingTag::Integers,
            Repr::Rat(_) => RingTag::Rationals,
            Repr::Mod { modulus, .. } => RingTag::IntegersMod(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Int(v) => v.is_zero(),
            Repr::Rat(v) => v.is_zero(),
            Repr::Mod { residue, .. } => *residue == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Int(v) => v.is_one(),
            Repr::Rat(v) => v.is_one(),
            Repr::Mod { residue, .. } => *residue == 1,
        }
    }

    pub fn is_unit(&self) -> bool {
        match &self.0 {
            Repr::Int(v) => v.abs().is_one(),
            Repr::Rat(v) => !v.is_zero(),
            Repr::Mod { residue, modulus } => residue.gcd(modulus) == 1,
        }
    }

    /// The integer payload, for ℤ scalars.
    pub fn as_integer(&self) -> Option<&BigInt> {
        match &self.0 {
            Repr::Int(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Rat(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_residue(&self) -> Option<u64> {
        match &self.0 {
            Repr::Mod { residue, .. } => Some(*residue),
            _ => None,
        }
    }

    /// Maps the value into `target` along the canonical map out of ℤ (or
    /// ℚ → ℤ/m where the denominator is a unit).
    pub fn convert(&self, target: RingTag) -> Result<Scalar, ScalarError> {
        if self.ring() == target {
            return Ok(self.clone());
        }
        let fail = || ScalarError::NoReduction {
            value: self.to_string(),
            ring: target,
        };
        match (&self.0, target) {
            (Repr::Int(v), _) => Ok(Scalar::from_bigint(target, v)),
            (Repr::Rat(v), RingTag::Integers) if v.is_integer() => {
                Ok(Scalar(Repr::Int(v.to_integer())))
            }
            (Repr::Rat(v), RingTag::IntegersMod(_)) => {
                let num = Scalar::from_bigint(target, v.numer());
                let den = Scalar::from_bigint(target, v.denom());
                let inv = den.inv().map_err(|_| fail())?;
                Ok(&num * &inv)
            }
            _ => Err(fail()),
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_ring(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_ring(other)?;
        Ok(self.add_unchecked(&other.negated()))
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_ring(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn negated(&self) -> Scalar {
        match &self.0 {
            Repr::Int(v) => Scalar(Repr::Int(-v)),
            Repr::Rat(v) => Scalar(Repr::Rat(-v)),
            Repr::Mod { residue, modulus } => Scalar(Repr::Mod {
                residue: if *residue == 0 { 0 } else { modulus - residue },
                modulus: *modulus,
            }),
        }
    }

    /// Multiplicative inverse; `NotAUnit` for zero, non-unit integers and
    /// zero divisors of ℤ/m.
    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        let not_unit = || ScalarError::NotAUnit {
            value: self.to_string(),
            ring: self.ring(),
        };
        match &self.0 {
            Repr::Int(v) if v.abs().is_one() => Ok(self.clone()),
            Repr::Int(_) => Err(not_unit()),
            Repr::Rat(v) if v.is_zero() => Err(not_unit()),
            Repr::Rat(v) => Ok(Scalar(Repr::Rat(v.recip()))),
            Repr::Mod { residue, modulus } => mod_inverse(*residue, *modulus)
                .map(|r| Scalar(Repr::Mod {
                    residue: r,
                    modulus: *modulus,
                }))
                .ok_or_else(not_unit),
        }
    }

    pub fn pow(&self, exp: u32) -> Scalar {
        let mut acc = Scalar::one(self.ring());
        for _ in 0..exp {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    /// Parses the textual syntax: optional-sign integers, `p/q` over ℚ.
    /// Over ℤ/m any integer is accepted and reduced.
    pub fn parse(ring: RingTag, text: &str) -> Result<Scalar, ScalarError> {
        let fail = || ScalarError::Parse {
            text: text.to_string(),
            ring,
        };
        let parse_int = |s: &str| -> Result<BigInt, ScalarError> {
            let s = s.trim();
            let digits = s.strip_prefix('+').unwrap_or(s);
            if digits.is_empty() || digits.starts_with('+') {
                return Err(fail());
            }
            BigInt::from_str(digits).map_err(|_| fail())
        };
        match ring {
            RingTag::Rationals => match text.split_once('/') {
                Some((p, q)) => {
                    let p = parse_int(p)?;
                    let q = parse_int(q)?;
                    if q.is_zero() {
                        return Err(fail());
                    }
                    Ok(Scalar(Repr::Rat(BigRational::new(p, q))))
                }
                None => Ok(Scalar::from_bigint(ring, &parse_int(text)?)),
            },
            _ => Ok(Scalar::from_bigint(ring, &parse_int(text)?)),
        }
    }

    fn same_ring(&self, other: &Scalar) -> Result<(), ScalarError> {
        if self.ring() == other.ring() {
            Ok(())
        } else {
            Err(ScalarError::RingMismatch(self.ring(), other.ring()))
        }
    }

    fn add_unchecked(&self, other: &Scalar) -> Scalar {
        match (&self.0, &other.0) {
            (Repr::Int(a), Repr::Int(b)) => Scalar(Repr::Int(a + b)),
            (Repr::Rat(a), Repr::Rat(b)) => Scalar(Repr::Rat(a + b)),
            (
                Repr::Mod { residue: a, modulus },
                Repr::Mod {
                    residue: b,
                    modulus: mb,
                },
            ) if modulus == mb => {
                let s = (u128::from(*a) + u128::from(*b)) % u128::from(*modulus);
                Scalar(Repr::Mod {
                    residue: s as u64,
                    modulus: *modulus,
                })
            }
            _ => panic!("ring mismatch: {} vs {}", self.ring(), other.ring()),
        }
    }

    fn mul_unchecked(&self, other: &Scalar) -> Scalar {
        match (&self.0, &other.0) {
            (Repr::Int(a), Repr::Int(b)) => Scalar(Repr::Int(a * b)),
            (Repr::Rat(a), Repr::Rat(b)) => Scalar(Repr::Rat(a * b)),
            (
                Repr::Mod { residue: a, modulus },
                Repr::Mod {
                    residue: b,
                    modulus: mb,
                },
            ) if modulus == mb => {
                let p = (u128::from(*a) * u128::from(*b)) % u128::from(*modulus);
                Scalar(Repr::Mod {
                    residue: p as u64,
                    modulus: *modulus,
                })
            }
            _ => panic!("ring mismatch: {} vs {}", self.ring(), other.ring()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Int(v) => write!(f, "{v}"),
            Repr::Rat(v) if v.is_integer() => write!(f, "{}", v.numer()),
            Repr::Rat(v) => write!(f, "{}/{}", v.numer(), v.denom()),
            Repr::Mod { residue, .. } => write!(f, "{residue}"),
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.add_unchecked(rhs)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.add_unchecked(&rhs.negated())
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.mul_unchecked(rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.negated()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.negated()
    }
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (i128::from(a), i128::from(m));
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(i128::from(m)) as u64)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
