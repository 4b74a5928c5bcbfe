//! Negacyclic products through a complex FFT of half length.
//!
//! A real polynomial of degree `< N` is folded into `N/2` complex values
//! `a_j + i·a_{j+N/2}`, twisted by `e^{iπj/N}` and transformed. The result
//! holds the evaluations at the roots `e^{iπ(4k+1)/N}` of `X^N + 1`, one per
//! conjugate pair, so products in the ring become pointwise products.
//!
//! Double precision cannot hold a full 64-bit product sum. Callers treat the
//! rounding error of [`NegacyclicFft::backward_add`] as extra ciphertext
//! noise; [`NegacyclicFft::mul_binary_exact`] splits its operand into limbs
//! so the result is exact.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Evaluations of a ring element, `N/2` complex values.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierPoly(pub Vec<Complex64>);

impl FourierPoly {
    pub fn zero(n: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); n / 2])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub struct NegacyclicFft {
    n: usize,
    to_spectrum: Arc<dyn Fft<f64>>,
    from_spectrum: Arc<dyn Fft<f64>>,
    twist: Vec<Complex64>,
    untwist: Vec<Complex64>,
    scratch_len: usize,
}

const LIMB_BITS: u32 = 32;
const LIMB_MASK: u64 = (1 << LIMB_BITS) - 1;

thread_local! {
    static SCRATCH: RefCell<Vec<Complex64>> = const { RefCell::new(Vec::new()) };
}

/// The shared transform for ring dimension `n`.
pub fn plan(n: usize) -> Arc<NegacyclicFft> {
    static PLANS: OnceLock<Mutex<HashMap<usize, Arc<NegacyclicFft>>>> = OnceLock::new();
    let plans = PLANS.get_or_init(Default::default);
    let mut guard = plans.lock().expect("fft plan cache poisoned");
    guard.entry(n).or_insert_with(|| Arc::new(NegacyclicFft::new(n))).clone()
}

impl NegacyclicFft {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two() && n >= 2, "unsupported ring dimension {n}");
        let half = n / 2;
        let mut planner = FftPlanner::new();
        // Positive-exponent transform evaluates the twisted polynomial.
        let to_spectrum = planner.plan_fft_inverse(half);
        let from_spectrum = planner.plan_fft_forward(half);
        let twist = (0..half)
            .map(|j| Complex64::from_polar(1.0, PI * j as f64 / n as f64))
            .collect();
        let untwist = (0..half)
            .map(|j| Complex64::from_polar(1.0 / half as f64, -PI * j as f64 / n as f64))
            .collect();
        let scratch_len = to_spectrum
            .get_inplace_scratch_len()
            .max(from_spectrum.get_inplace_scratch_len());
        Self { n, to_spectrum, from_spectrum, twist, untwist, scratch_len }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn run(&self, fft: &dyn Fft<f64>, buf: &mut [Complex64]) {
        SCRATCH.with(|s| {
            let mut s = s.borrow_mut();
            if s.len() < self.scratch_len {
                s.resize(self.scratch_len, Complex64::new(0.0, 0.0));
            }
            fft.process_with_scratch(buf, &mut s[..self.scratch_len]);
        });
    }

    fn forward_with(&self, out: &mut FourierPoly, coeff: impl Fn(usize) -> f64) {
        let half = self.n / 2;
        debug_assert_eq!(out.len(), half);
        for (j, (slot, tw)) in out.0.iter_mut().zip(&self.twist).enumerate() {
            *slot = Complex64::new(coeff(j), coeff(j + half)) * tw;
        }
        self.run(self.to_spectrum.as_ref(), &mut out.0);
    }

    /// Transforms signed coefficients.
    pub fn forward_i64(&self, coeffs: &[i64], out: &mut FourierPoly) {
        debug_assert_eq!(coeffs.len(), self.n);
        self.forward_with(out, |j| coeffs[j] as f64);
    }

    /// Transforms coefficients read as centered representatives in `[-2^63, 2^63)`.
    pub fn forward_u64(&self, coeffs: &[u64], out: &mut FourierPoly) {
        debug_assert_eq!(coeffs.len(), self.n);
        self.forward_with(out, |j| coeffs[j] as i64 as f64);
    }

    pub fn forward_u64_new(&self, coeffs: &[u64]) -> FourierPoly {
        let mut out = FourierPoly::zero(self.n);
        self.forward_u64(coeffs, &mut out);
        out
    }

    /// Inverse transform of `spec` (clobbered), rounded and added into `out` mod 2^64.
    pub fn backward_add(&self, spec: &mut FourierPoly, out: &mut [u64]) {
        let half = self.n / 2;
        debug_assert_eq!(out.len(), self.n);
        self.run(self.from_spectrum.as_ref(), &mut spec.0);
        let (lo, hi) = out.split_at_mut(half);
        for (((v, tw), l), h) in spec.0.iter().zip(&self.untwist).zip(lo).zip(hi) {
            let x = v * tw;
            *l = l.wrapping_add(wrap_round(x.re));
            *h = h.wrapping_add(wrap_round(x.im));
        }
    }

    /// Inverse transform rounded to exact integers; only meaningful when the
    /// true coefficients are far below 2^53.
    pub fn backward_i64(&self, spec: &mut FourierPoly, out: &mut [i64]) {
        let half = self.n / 2;
        self.run(self.from_spectrum.as_ref(), &mut spec.0);
        let (lo, hi) = out.split_at_mut(half);
        for (((v, tw), l), h) in spec.0.iter().zip(&self.untwist).zip(lo).zip(hi) {
            let x = v * tw;
            *l = x.re.round() as i64;
            *h = x.im.round() as i64;
        }
    }

    /// Exact `a · s` for a polynomial `s` with coefficients in `{0, 1}`,
    /// given the transform of `s`.
    ///
    /// `a` is split into two 32-bit limbs. Each limb product is a sum of at
    /// most `N` terms below 2^32, small enough to round back without error.
    pub fn mul_binary_exact(&self, a: &[u64], s_spec: &FourierPoly, out: &mut [u64]) {
        debug_assert_eq!(a.len(), self.n);
        out.fill(0);
        let mut buf = FourierPoly::zero(self.n);
        let mut limb_out = vec![0i64; self.n];
        for limb in 0..2u32 {
            let shift = limb * LIMB_BITS;
            self.forward_with(&mut buf, |j| ((a[j] >> shift) & LIMB_MASK) as f64);
            mul_assign(&mut buf, s_spec);
            self.backward_i64(&mut buf, &mut limb_out);
            for (o, &v) in out.iter_mut().zip(&limb_out) {
                *o = o.wrapping_add((v as u64).wrapping_shl(shift));
            }
        }
    }
}

const TWO_64: f64 = 18446744073709551616.0;

#[inline]
fn wrap_round(x: f64) -> u64 {
    // Subtracting the nearest multiple of 2^64 is exact: both terms share the
    // ulp of x, and the difference fits in [-2^63, 2^63].
    let r = x - (x * (1.0 / TWO_64)).round() * TWO_64;
    r.round() as i64 as u64
}

/// `acc[k] *= rhs[k]`.
pub fn mul_assign(acc: &mut FourierPoly, rhs: &FourierPoly) {
    for (a, b) in acc.0.iter_mut().zip(&rhs.0) {
        *a *= b;
    }
}

/// `acc[k] += a[k] · b[k]`.
#[inline]
pub fn mul_add_assign(acc: &mut FourierPoly, a: &FourierPoly, b: &FourierPoly) {
    for ((acc, x), y) in acc.0.iter_mut().zip(&a.0).zip(&b.0) {
        *acc += x * y;
    }
}
