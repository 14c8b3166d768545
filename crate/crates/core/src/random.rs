//! Seeded sampling of scalars and matrices.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exalg::{wedge, Indexing, SquareMatrix};
use crate::scalar::{RingTag, Scalar};
use crate::transvect::Transvection;

/// Recorded in output metadata so corpora can be regenerated.
pub const PRNG_ID: &str = "chacha8";

pub type TestRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform residue over `ℤ/m`; small entries in `[-3, 3]` over ℤ;
/// fractions with numerator in `[-5, 5]` and denominator in `[1, 4]` over ℚ.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R, ring: RingTag) -> Scalar {
    match ring {
        RingTag::Integers => Scalar::from_i64(ring, rng.random_range(-3..=3)),
        RingTag::Rationals => {
            let num = rng.random_range(-5i64..=5);
            let den = rng.random_range(1i64..=4);
            Scalar::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
        }
        RingTag::IntegersMod(m) => Scalar::residue(rng.random_range(0..m), m).expect("valid modulus"),
    }
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, ring: RingTag, indexing: Indexing) -> SquareMatrix {
    let side = indexing.side();
    let entries = (0..side * side).map(|_| random_scalar(rng, ring)).collect();
    SquareMatrix::new(ring, indexing, entries).expect("entry count matches")
}

/// A random element of `GL_n(R)`. Over ℤ this is a product of `3n`
/// transvections (determinant 1); otherwise rejection sampling on the
/// determinant.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, ring: RingTag, n: usize) -> SquareMatrix {
    if ring == RingTag::Integers {
        return random_unimodular(rng, n, 3 * n);
    }
    loop {
        let x = random_matrix(rng, ring, Indexing::Plain(n));
        if x.is_invertible() {
            return x;
        }
    }
}

/// Product of `length` transvections `t_{i,j}(ξ)` with `ξ ∈ [-2, 2]`.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, n: usize, length: usize) -> SquareMatrix {
    let ring = RingTag::Integers;
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
        let xi = Scalar::from_i64(ring, rng.random_range(-2..=2));
        Transvection::plain(n, i, j, xi)
            .expect("distinct indices in range")
            .apply_right(&mut m);
    }
    m
}

/// `∧²x` for a random invertible `x`; returns both.
pub fn random_member<R: Rng + ?Sized>(rng: &mut R, ring: RingTag, n: usize) -> (SquareMatrix, SquareMatrix) {
    let x = random_invertible(rng, ring, n);
    let g = wedge(2, &x).expect("arity 2 fits n >= 2");
    (x, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let a = random_matrix(&mut rng_from_seed(5), RingTag::IntegersMod(97), Indexing::Plain(4));
        let b = random_matrix(&mut rng_from_seed(5), RingTag::IntegersMod(97), Indexing::Plain(4));
        assert_eq!(a, b);
    }

    #[test]
    fn invertible_samples() {
        let mut rng = rng_from_seed(1);
        for ring in [RingTag::Integers, RingTag::Rationals, RingTag::IntegersMod(12)] {
            let x = random_invertible(&mut rng, ring, 4);
            assert!(x.determinant().is_unit());
        }
        assert!(random_unimodular(&mut rng, 5, 30).determinant().is_one());
    }
}
