//! Deterministic random sampling of exact scalars, vectors, and matrices.
//!
//! All randomness in the crate flows through a `ChaCha8` stream seeded from a
//! user-visible `u64` seed mixed with context (which subspace is being
//! sampled, which retry attempt).  Identical seeds therefore reproduce whole
//! runs bit-for-bit, across platforms and thread counts.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{Matrix, Scalar};

/// SplitMix64-style stateless mixing of seed material.
#[derive(Clone, Copy, Debug)]
pub struct SeedMixer(u64);

impl SeedMixer {
    pub fn new(seed: u64) -> Self {
        SeedMixer(seed)
    }

    /// Fold another value into the state, returning a new mixer.
    pub fn with(self, value: u64) -> Self {
        let mut z = self.0 ^ value.wrapping_mul(0x9e3779b97f4a7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        SeedMixer(z ^ (z >> 31))
    }

    pub fn with_str(self, s: &str) -> Self {
        let mut m = self;
        for chunk in s.as_bytes().chunks(8) {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            m = m.with(u64::from_le_bytes(buf));
        }
        m.with(s.len() as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// A random rational with numerator in `[-height, height]` and denominator in
/// `[1, height]` (height clamped to at least 1).
pub fn random_rational(rng: &mut ChaCha8Rng, height: u64) -> BigRational {
    let h = height.max(1) as i64;
    let num = rng.gen_range(-h..=h);
    let den = rng.gen_range(1..=h);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Random scalar of bounded height; purely rational (no imaginary part).
/// Rational coefficients suffice everywhere because the structure constants
/// of every realized algebra live in the base field.
pub fn random_scalar(rng: &mut ChaCha8Rng, height: u64) -> Scalar {
    Scalar::from_rational(random_rational(rng, height))
}

pub fn random_vector(rng: &mut ChaCha8Rng, len: usize, height: u64) -> Vec<Scalar> {
    (0..len).map(|_| random_scalar(rng, height)).collect()
}

/// A random integer scalar in `[-height, height]`.  Every rational direction
/// is a scalar multiple of an integer one and all the structural invariants
/// (centralizers, spans, brackets-with) are scale-invariant, so integer
/// coefficients sample the same set of directions while keeping downstream
/// exact eliminations in small-integer arithmetic.
pub fn random_int_scalar(rng: &mut ChaCha8Rng, height: u64) -> Scalar {
    let h = height.max(1) as i64;
    Scalar::from_int(rng.gen_range(-h..=h))
}

pub fn random_int_vector(rng: &mut ChaCha8Rng, len: usize, height: u64) -> Vec<Scalar> {
    (0..len).map(|_| random_int_scalar(rng, height)).collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, height: u64) -> Matrix {
    let mut m = Matrix::zero(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, random_scalar(rng, height));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixing_is_deterministic_and_order_sensitive() {
        let a = SeedMixer::new(1).with(2).with(3).value();
        let b = SeedMixer::new(1).with(2).with(3).value();
        let c = SeedMixer::new(1).with(3).with(2).value();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(
            SeedMixer::new(1).with_str("xy").value(),
            SeedMixer::new(1).with_str("yx").value()
        );
    }

    #[test]
    fn sampling_reproduces_with_same_seed() {
        let mut r1 = SeedMixer::new(42).with(7).rng();
        let mut r2 = SeedMixer::new(42).with(7).rng();
        let v1 = random_vector(&mut r1, 10, 20);
        let v2 = random_vector(&mut r2, 10, 20);
        assert_eq!(v1, v2);
        let m1 = random_matrix(&mut r1, 3, 3, 5);
        let m2 = random_matrix(&mut r2, 3, 3, 5);
        assert_eq!(m1.flatten(), m2.flatten());
    }

    #[test]
    fn heights_are_respected() {
        let mut rng = SeedMixer::new(9).rng();
        for _ in 0..200 {
            let q = random_rational(&mut rng, 6);
            let num: BigInt = q.numer().clone();
            let den: BigInt = q.denom().clone();
            assert!(num.magnitude() <= &num_bigint::BigUint::from(6u64 * 6));
            assert!(den.magnitude() <= &num_bigint::BigUint::from(6u64));
        }
    }
}
