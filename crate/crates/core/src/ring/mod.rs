//! Arithmetic in the negacyclic ring `Z_q[X]/(X^N + 1)` with `q = 2^64`.
//!
//! Coefficients are plain `u64` words and every operation wraps, so the
//! modulus never appears explicitly. Two multiplication routes exist:
//! [`RingPoly::negacyclic_mul`] is the exact schoolbook reference, and
//! [`fft::NegacyclicFft`] is the fast floating-point route used by the
//! ciphertext operations, whose rounding error is absorbed as noise.

pub mod fft;
mod gadget;

use std::ops::{AddAssign, Neg, SubAssign};

pub use gadget::GadgetSpec;

use crate::error::{Error, Result};

/// An element of `Z_{2^64}[X]/(X^N + 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingPoly {
    coeffs: Vec<u64>,
}

impl RingPoly {
    /// Wraps a coefficient vector, checking that its length is a power of two.
    pub fn new(coeffs: Vec<u64>) -> Result<Self> {
        if !coeffs.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(coeffs.len()));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(n: usize) -> Self {
        assert!(n.is_power_of_two(), "ring dimension {n} is not a power of two");
        Self { coeffs: vec![0; n] }
    }

    /// The constant polynomial `c`.
    pub fn constant(n: usize, c: u64) -> Self {
        let mut p = Self::zero(n);
        p.coeffs[0] = c;
        p
    }

    /// `X^e` reduced in the ring (so `X^N = -1`).
    pub fn monomial(n: usize, e: i64) -> Self {
        Self::constant(n, 1).monomial_mul(e)
    }

    /// Builds a polynomial from signed coefficients.
    pub fn from_signed(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| c as u64).collect())
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree_log(&self) -> u32 {
        self.coeffs.len().trailing_zeros()
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [u64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::Dimension { expected: self.len(), found: other.len() });
        }
        Ok(())
    }

    /// Coefficient-wise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        out += other;
        Ok(out)
    }

    /// Coefficient-wise difference.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        out -= other;
        Ok(out)
    }

    /// Multiplies every coefficient by a scalar.
    pub fn scalar_mul(&self, k: u64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.wrapping_mul(k)).collect() }
    }

    /// Exact product in the ring by schoolbook convolution with sign folding.
    ///
    /// Quadratic in `N`; this is the reference route used for oracles and
    /// small-dimension checks.
    pub fn negacyclic_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.len();
        let mut out = vec![0u64; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let prod = a.wrapping_mul(b);
                let k = i + j;
                if k < n {
                    out[k] = out[k].wrapping_add(prod);
                } else {
                    out[k - n] = out[k - n].wrapping_sub(prod);
                }
            }
        }
        Ok(Self { coeffs: out })
    }

    /// `self * X^e`, with `e` taken modulo `2N`.
    pub fn monomial_mul(&self, e: i64) -> Self {
        let mut out = Self::zero(self.len());
        self.monomial_mul_into(e, &mut out.coeffs);
        out
    }

    /// Writes `self * X^e` into `out`, which must have the same length.
    pub fn monomial_mul_into(&self, e: i64, out: &mut [u64]) {
        let n = self.len();
        debug_assert_eq!(out.len(), n);
        let two_n = 2 * n as i64;
        let mut e = e.rem_euclid(two_n) as usize;
        let negate_all = e >= n;
        if negate_all {
            e -= n;
        }
        // Coefficient i moves to i + e; the ones that wrap past X^N flip sign.
        let (head, tail) = self.coeffs.split_at(n - e);
        for (dst, &c) in out[e..].iter_mut().zip(head) {
            *dst = if negate_all { c.wrapping_neg() } else { c };
        }
        for (dst, &c) in out[..e].iter_mut().zip(tail) {
            *dst = if negate_all { c } else { c.wrapping_neg() };
        }
    }
}

impl AddAssign<&RingPoly> for RingPoly {
    fn add_assign(&mut self, rhs: &RingPoly) {
        assert_eq!(self.len(), rhs.len(), "ring dimension mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = a.wrapping_add(*b);
        }
    }
}

impl SubAssign<&RingPoly> for RingPoly {
    fn sub_assign(&mut self, rhs: &RingPoly) {
        assert_eq!(self.len(), rhs.len(), "ring dimension mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = a.wrapping_sub(*b);
        }
    }
}

impl Neg for &RingPoly {
    type Output = RingPoly;

    fn neg(self) -> RingPoly {
        RingPoly { coeffs: self.coeffs.iter().map(|c| c.wrapping_neg()).collect() }
    }
}

/// Coefficient-wise addition; fails when the dimensions differ.
pub fn poly_add(a: &RingPoly, b: &RingPoly) -> Result<RingPoly> {
    a.add(b)
}

/// Exact negacyclic product; fails when the dimensions differ.
pub fn negacyclic_mul(a: &RingPoly, b: &RingPoly) -> Result<RingPoly> {
    a.negacyclic_mul(b)
}

/// `a * X^e` in the ring.
pub fn monomial_mul(a: &RingPoly, e: i64) -> RingPoly {
    a.monomial_mul(e)
}

/// Signed gadget digits of `a`, most significant level first.
pub fn gadget_decompose(a: &RingPoly, g: &GadgetSpec) -> Vec<RingPoly> {
    g.decompose(a)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    /// Independent oracle: full product of degree < 2N, folded afterwards.
    fn schoolbook_oracle(a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = a.len();
        let mut full = vec![0u64; 2 * n];
        for i in 0..n {
            for j in 0..n {
                full[i + j] = full[i + j].wrapping_add(a[i].wrapping_mul(b[j]));
            }
        }
        (0..n).map(|i| full[i].wrapping_sub(full[i + n])).collect()
    }

    fn poly(v: &[u64]) -> RingPoly {
        RingPoly::new(v.to_vec()).unwrap()
    }

    #[test]
    fn add_small_case() {
        assert_eq!(poly_add(&poly(&[1, 2]), &poly(&[3, 4])).unwrap(), poly(&[4, 6]));
    }

    #[test]
    fn add_identity_and_inverse() {
        let a = poly(&[5, u64::MAX, 7, 0]);
        assert_eq!(a.add(&RingPoly::zero(4)).unwrap(), a);
        assert!(a.add(&-&a).unwrap().is_zero());
    }

    #[test]
    fn mismatched_dimensions() {
        let err = poly_add(&RingPoly::zero(4), &RingPoly::zero(8)).unwrap_err();
        assert!(matches!(err, Error::Dimension { expected: 4, found: 8 }));
        assert!(negacyclic_mul(&RingPoly::zero(4), &RingPoly::zero(2)).is_err());
        assert!(RingPoly::new(vec![0; 3]).is_err());
    }

    #[test]
    fn negacyclic_wrap() {
        let n = 8;
        let x = RingPoly::monomial(n, 1);
        let top = RingPoly::monomial(n, n as i64 - 1);
        let prod = x.negacyclic_mul(&top).unwrap();
        let mut expected = vec![0u64; n];
        expected[0] = u64::MAX;
        assert_eq!(prod.coeffs(), &expected[..]);
    }

    #[test]
    fn mul_identity() {
        let a = poly(&[3, 1, 4, 1, 5, 9, 2, 6]);
        assert_eq!(a.negacyclic_mul(&RingPoly::constant(8, 1)).unwrap(), a);
    }

    #[test]
    fn mul_matches_oracle_at_n8() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a: Vec<u64> = (0..8).map(|_| rng.random()).collect();
            let b: Vec<u64> = (0..8).map(|_| rng.random()).collect();
            let got = poly(&a).negacyclic_mul(&poly(&b)).unwrap();
            assert_eq!(got.coeffs(), &schoolbook_oracle(&a, &b)[..]);
        }
    }

    #[test]
    fn monomial_examples() {
        let v = poly(&[1, 2, 3, 4]);
        assert_eq!(v.monomial_mul(0), v);
        assert_eq!(poly(&[1, 0, 0, 0]).monomial_mul(1), poly(&[0, 1, 0, 0]));
        assert_eq!(v.monomial_mul(4), -&v);
        assert_eq!(v.monomial_mul(8), v);
        assert_eq!(v.monomial_mul(-1), poly(&[2, 3, 4, 1u64.wrapping_neg()]));
    }

    proptest! {
        #[test]
        fn mul_equals_oracle(
            log_n in 0u32..=4,
            seed in any::<u64>(),
        ) {
            let n = 1usize << log_n;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a: Vec<u64> = (0..n).map(|_| rng.random()).collect();
            let b: Vec<u64> = (0..n).map(|_| rng.random()).collect();
            let got = poly(&a).negacyclic_mul(&poly(&b)).unwrap();
            prop_assert_eq!(got.coeffs(), &schoolbook_oracle(&a, &b)[..]);
        }

        #[test]
        fn monomial_round_trip(e in -100i64..100, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = poly(&(0..16).map(|_| rng.random()).collect::<Vec<u64>>());
            prop_assert_eq!(a.monomial_mul(e).monomial_mul(-e), a.clone());
            // Agrees with multiplication by the monomial polynomial.
            prop_assert_eq!(
                a.monomial_mul(e),
                a.negacyclic_mul(&RingPoly::monomial(16, e)).unwrap()
            );
        }
    }
}
