use super::RingPoly;
use crate::error::{Error, Result};

/// Signed gadget decomposition with `levels` digits in base `2^base_log`.
///
/// Level `t` (1-based) carries weight `q / β^t = 2^(64 - t·base_log)`.
/// Digits are centered in `[-β/2, β/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GadgetSpec {
    levels: usize,
    base_log: u32,
}

impl GadgetSpec {
    pub fn new(levels: usize, base_log: u32) -> Result<Self> {
        if levels == 0 || base_log == 0 {
            return Err(Error::InvalidParams("gadget levels and base must be positive".into()));
        }
        if levels as u64 * base_log as u64 > 64 {
            return Err(Error::InvalidParams(format!(
                "gadget precision {levels}x{base_log} exceeds 64 bits"
            )));
        }
        Ok(Self { levels, base_log })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn base_log(&self) -> u32 {
        self.base_log
    }

    pub fn base(&self) -> u64 {
        1u64 << self.base_log
    }

    fn precision(&self) -> u32 {
        self.levels as u32 * self.base_log
    }

    /// Weight `q / β^t` of level `t`, for `t` in `1..=levels`.
    pub fn weight(&self, t: usize) -> u64 {
        debug_assert!((1..=self.levels).contains(&t));
        1u64 << (64 - t as u32 * self.base_log)
    }

    /// `x` rounded to the nearest multiple of `q / β^levels`.
    pub fn round(&self, x: u64) -> u64 {
        let p = self.precision();
        if p == 64 {
            return x;
        }
        let shift = 64 - p;
        (x.wrapping_add(1u64 << (shift - 1)) >> shift) << shift
    }

    #[inline]
    fn rounded_top(&self, x: u64) -> u64 {
        let p = self.precision();
        if p == 64 {
            x
        } else {
            let shift = 64 - p;
            x.wrapping_add(1u64 << (shift - 1)) >> shift
        }
    }

    /// Writes the digits of `x` into `out`, most significant level first.
    #[inline]
    pub fn decompose_scalar(&self, x: u64, out: &mut [i64]) {
        debug_assert_eq!(out.len(), self.levels);
        let mut rest = self.rounded_top(x);
        let mask = self.base() - 1;
        let half = self.base() >> 1;
        for digit in out.iter_mut().rev() {
            let d = rest & mask;
            rest >>= self.base_log;
            let carry = (d >= half) as u64;
            *digit = d as i64 - ((carry as i64) << self.base_log);
            rest += carry;
        }
    }

    /// Decomposes every coefficient; `out[t]` receives the level-`t+1` digits.
    pub fn decompose_into(&self, coeffs: &[u64], out: &mut [Vec<i64>]) {
        debug_assert_eq!(out.len(), self.levels);
        let mask = self.base() - 1;
        let half = self.base() >> 1;
        let base_log = self.base_log;
        let mut rest: Vec<u64> = coeffs.iter().map(|&c| self.rounded_top(c)).collect();
        for level in out.iter_mut().rev() {
            for (dst, r) in level.iter_mut().zip(rest.iter_mut()) {
                let d = *r & mask;
                let carry = (d >= half) as u64;
                *dst = d as i64 - ((carry as i64) << base_log);
                *r = (*r >> base_log) + carry;
            }
        }
    }

    /// Digit polynomials of `a`, most significant level first, with signed
    /// digits stored in two's complement.
    pub fn decompose(&self, a: &RingPoly) -> Vec<RingPoly> {
        let n = a.len();
        let mut levels = vec![vec![0i64; n]; self.levels];
        self.decompose_into(a.coeffs(), &mut levels);
        levels
            .into_iter()
            .map(|l| RingPoly { coeffs: l.into_iter().map(|d| d as u64).collect() })
            .collect()
    }

    /// `Σ_t digits[t-1] · q/β^t`.
    pub fn recompose(&self, digits: &[RingPoly]) -> Result<RingPoly> {
        if digits.len() != self.levels {
            return Err(Error::Dimension { expected: self.levels, found: digits.len() });
        }
        let n = digits[0].len();
        let mut out = RingPoly::zero(n);
        for (t, d) in digits.iter().enumerate() {
            out += &d.scalar_mul(self.weight(t + 1));
        }
        Ok(out)
    }
}
