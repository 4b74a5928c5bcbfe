use std::ops::{AddAssign, SubAssign};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::keys::uniform_poly;
use super::{HeParams, SecretKey};
use crate::error::{Error, Result};
use crate::ring::fft::{self, FourierPoly};
use crate::ring::{GadgetSpec, RingPoly};

/// `(a, b)` with phase `b − a·S1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RlweCiphertext {
    pub a: RingPoly,
    pub b: RingPoly,
}

impl RlweCiphertext {
    pub fn zero(n: usize) -> Self {
        Self { a: RingPoly::zero(n), b: RingPoly::zero(n) }
    }

    /// Noiseless `(0, m·q/p)`, valid under every key.
    pub fn trivial(m: &[u64], params: &HeParams) -> Result<Self> {
        let b = encode(m, params)?;
        Ok(Self { a: RingPoly::zero(params.n), b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `c · X^e`.
    pub fn monomial_mul(&self, e: i64) -> Self {
        Self { a: self.a.monomial_mul(e), b: self.b.monomial_mul(e) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self { a: self.a.add(&other.a)?, b: self.b.add(&other.b)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self { a: self.a.sub(&other.a)?, b: self.b.sub(&other.b)? })
    }
}

impl AddAssign<&RlweCiphertext> for RlweCiphertext {
    fn add_assign(&mut self, rhs: &RlweCiphertext) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl SubAssign<&RlweCiphertext> for RlweCiphertext {
    fn sub_assign(&mut self, rhs: &RlweCiphertext) {
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}

/// Scalar ciphertext under the coefficient vector of `S1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LweCiphertext {
    pub a: Vec<u64>,
    pub b: u64,
}

impl LweCiphertext {
    pub fn trivial(m: u64, params: &HeParams) -> Self {
        Self { a: vec![0; params.n], b: m.wrapping_mul(params.delta()) }
    }

    pub fn phase(&self, key: &SecretKey) -> u64 {
        let dot = self
            .a
            .iter()
            .zip(key.lwe_key())
            .fold(0u64, |acc, (&a, &s)| acc.wrapping_add(a.wrapping_mul(s)));
        self.b.wrapping_sub(dot)
    }
}

/// `2ℓ` RLWE rows: rows `0..ℓ` add `m·q/β^t` to `b`, rows `ℓ..2ℓ` add it to `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgswCiphertext {
    pub gadget: GadgetSpec,
    pub rows: Vec<RlweCiphertext>,
}

/// An RGSW ciphertext with every row polynomial held in the Fourier domain.
#[derive(Clone, Debug)]
pub struct FourierRgsw {
    pub(crate) gadget: GadgetSpec,
    pub(crate) rows: Vec<[FourierPoly; 2]>,
}

impl FourierRgsw {
    pub fn new(c: &RgswCiphertext) -> Self {
        let plan = fft::plan(c.rows[0].len());
        let rows = c
            .rows
            .iter()
            .map(|r| [plan.forward_u64_new(r.a.coeffs()), plan.forward_u64_new(r.b.coeffs())])
            .collect();
        Self { gadget: c.gadget, rows }
    }

    pub fn levels(&self) -> usize {
        self.rows.len() / 2
    }
}

impl From<&RgswCiphertext> for FourierRgsw {
    fn from(c: &RgswCiphertext) -> Self {
        Self::new(c)
    }
}

pub(crate) fn round_div(x: u64, delta_log: u32) -> u64 {
    if delta_log == 0 {
        return x;
    }
    x.wrapping_add(1u64 << (delta_log - 1)) >> delta_log
}

fn encode(m: &[u64], params: &HeParams) -> Result<RingPoly> {
    if m.len() != params.n {
        return Err(Error::Dimension { expected: params.n, found: m.len() });
    }
    let p = params.p();
    if let Some(&bad) = m.iter().find(|&&v| v >= p) {
        return Err(Error::Encoding { value: bad, modulus: p });
    }
    RingPoly::new(m.iter().map(|&v| v.wrapping_mul(params.delta())).collect())
}

/// Rounds each phase coefficient to the nearest multiple of `q/p`.
pub fn decode(phase: &RingPoly, params: &HeParams) -> Vec<u64> {
    let shift = 64 - params.p_log;
    phase.coeffs().iter().map(|&x| round_div(x, shift) & (params.p() - 1)).collect()
}

pub fn enc_rlwe<R: Rng + ?Sized>(m: &[u64], key: &SecretKey, rng: &mut R) -> Result<RlweCiphertext> {
    let params = key.params();
    let msg = encode(m, params)?;
    let mut c = key.encrypt_zero(rng);
    c.b += &msg;
    Ok(c)
}

pub fn dec_rlwe(c: &RlweCiphertext, key: &SecretKey) -> Vec<u64> {
    decode(&key.phase(c), key.params())
}

pub fn dec_lwe(c: &LweCiphertext, key: &SecretKey) -> u64 {
    let shift = 64 - key.params().p_log;
    round_div(c.phase(key), shift) & (key.params().p() - 1)
}

pub fn enc_rgsw<R: Rng + ?Sized>(m: u64, key: &SecretKey, rng: &mut R) -> Result<RgswCiphertext> {
    if m > 1 {
        return Err(Error::Encoding { value: m, modulus: 2 });
    }
    let g = key.params().gadget;
    let levels = g.levels();
    let mut rows = Vec::with_capacity(2 * levels);
    for half in 0..2 {
        for t in 1..=levels {
            let mut row = key.encrypt_zero(rng);
            if m == 1 {
                let target = if half == 0 { &mut row.b } else { &mut row.a };
                let c0 = &mut target.coeffs_mut()[0];
                *c0 = c0.wrapping_add(g.weight(t));
            }
            rows.push(row);
        }
    }
    Ok(RgswCiphertext { gadget: g, rows })
}

/// An RGSW ciphertext stored as its bodies plus the seed of its masks.
///
/// Mask rows carry the message in the body as `−m·w_t·S1` instead of adding
/// `m·w_t` to the mask, which gives the same phase and lets every mask be
/// regenerated from `seed`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeededRgsw {
    pub gadget: GadgetSpec,
    pub seed: [u8; 32],
    pub bodies: Vec<RingPoly>,
}

impl SeededRgsw {
    pub fn expand(&self) -> RgswCiphertext {
        let n = self.bodies[0].len();
        let mut masks = ChaCha20Rng::from_seed(self.seed);
        let rows = self
            .bodies
            .iter()
            .map(|b| RlweCiphertext { a: uniform_poly(n, &mut masks), b: b.clone() })
            .collect();
        RgswCiphertext { gadget: self.gadget, rows }
    }
}

pub fn enc_rgsw_seeded<R: Rng + ?Sized>(m: u64, key: &SecretKey, seed: [u8; 32], rng: &mut R) -> Result<SeededRgsw> {
    if m > 1 {
        return Err(Error::Encoding { value: m, modulus: 2 });
    }
    let params = key.params();
    let g = params.gadget;
    let levels = g.levels();
    let mut masks = ChaCha20Rng::from_seed(seed);
    let mut bodies = Vec::with_capacity(2 * levels);
    for half in 0..2 {
        for t in 1..=levels {
            let mut row = key.encrypt_zero_with_mask(uniform_poly(params.n, &mut masks), rng);
            if m == 1 {
                let w = g.weight(t);
                if half == 0 {
                    let c0 = &mut row.b.coeffs_mut()[0];
                    *c0 = c0.wrapping_add(w);
                } else {
                    for (b, &s) in row.b.coeffs_mut().iter_mut().zip(key.lwe_key()) {
                        *b = b.wrapping_sub(w.wrapping_mul(s));
                    }
                }
            }
            bodies.push(row.b);
        }
    }
    Ok(SeededRgsw { gadget: g, seed, bodies })
}

/// Noiseless RGSW encryption of a public bit.
pub fn trivial_rgsw(m: u64, params: &HeParams) -> Result<RgswCiphertext> {
    if m > 1 {
        return Err(Error::Encoding { value: m, modulus: 2 });
    }
    let g = params.gadget;
    let mut rows = vec![RlweCiphertext::zero(params.n); 2 * g.levels()];
    if m == 1 {
        for t in 1..=g.levels() {
            rows[t - 1].b.coeffs_mut()[0] = g.weight(t);
            rows[g.levels() + t - 1].a.coeffs_mut()[0] = g.weight(t);
        }
    }
    Ok(RgswCiphertext { gadget: g, rows })
}

/// Reads the first body row, whose phase is `m·q/β + e`.
pub fn dec_rgsw(c: &RgswCiphertext, key: &SecretKey) -> u64 {
    let phase = key.phase(&c.rows[0]).coeffs()[0];
    round_div(phase, 64 - key.params().gadget.base_log()) & 1
}
