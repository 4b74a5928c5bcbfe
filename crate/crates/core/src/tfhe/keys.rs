use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use super::{HeParams, RlweCiphertext};
use crate::error::Result;
use crate::ring::fft::{self, FourierPoly};
use crate::ring::RingPoly;

/// Identifier of the generator behind every seeded draw in this crate.
pub const PRNG_ID: &str = "chacha20";

/// Binary RLWE key `S1`. Extracted LWE ciphertexts use its coefficient vector.
#[derive(Clone, Debug)]
pub struct SecretKey {
    params: HeParams,
    s1: RingPoly,
    s_spec: FourierPoly,
}

impl SecretKey {
    /// Builds a key from explicit binary coefficients.
    pub fn from_bits(params: &HeParams, bits: &[u64]) -> Result<Self> {
        params.validate()?;
        let s1 = RingPoly::new(bits.to_vec())?;
        if s1.len() != params.n {
            return Err(crate::Error::Dimension { expected: params.n, found: s1.len() });
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(crate::Error::InvalidParams("secret key must be binary".into()));
        }
        let s_spec = fft::plan(params.n).forward_u64_new(s1.coeffs());
        Ok(Self { params: params.clone(), s1, s_spec })
    }

    pub fn params(&self) -> &HeParams {
        &self.params
    }

    pub fn s1(&self) -> &RingPoly {
        &self.s1
    }

    /// Coefficient vector of `S1`, the key of every extracted LWE ciphertext.
    pub fn lwe_key(&self) -> &[u64] {
        self.s1.coeffs()
    }

    /// Exact `a · S1`.
    pub fn mul_key(&self, a: &RingPoly) -> RingPoly {
        let mut out = vec![0u64; self.params.n];
        fft::plan(self.params.n).mul_binary_exact(a.coeffs(), &self.s_spec, &mut out);
        RingPoly::new(out).expect("power of two")
    }

    /// `b − a·S1`.
    pub fn phase(&self, c: &RlweCiphertext) -> RingPoly {
        let mut out = c.b.clone();
        out -= &self.mul_key(&c.a);
        out
    }

    /// A fresh encryption of zero, `(a, a·S1 + e)`.
    pub fn encrypt_zero<R: Rng + ?Sized>(&self, rng: &mut R) -> RlweCiphertext {
        let a = uniform_poly(self.params.n, rng);
        self.encrypt_zero_with_mask(a, rng)
    }

    /// `(a, a·S1 + e)` for a caller-supplied uniform mask.
    pub fn encrypt_zero_with_mask<R: Rng + ?Sized>(&self, a: RingPoly, rng: &mut R) -> RlweCiphertext {
        let mut b = self.mul_key(&a);
        add_gaussian(b.coeffs_mut(), self.params.sigma(), rng);
        RlweCiphertext { a, b }
    }
}

pub(crate) fn uniform_poly<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RingPoly {
    RingPoly::new((0..n).map(|_| rng.random()).collect()).expect("power of two")
}

impl SecretKey {
}

/// Adds rounded Gaussian noise of standard deviation `sigma` (absolute units).
pub(crate) fn add_gaussian<R: Rng + ?Sized>(coeffs: &mut [u64], sigma: f64, rng: &mut R) {
    if sigma == 0.0 {
        return;
    }
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    for c in coeffs {
        let e = normal.sample(rng).round() as i64;
        *c = c.wrapping_add(e as u64);
    }
}

/// Encryptions of `s_j · q/β_KS^t` under `S1`, one per key coefficient and level.
pub struct PackingKeySwitchKey {
    params: HeParams,
    /// Row `j·ℓ_KS + t`.
    rows: Vec<RlweCiphertext>,
    spectra: OnceLock<Vec<[FourierPoly; 2]>>,
}

impl std::fmt::Debug for PackingKeySwitchKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PackingKeySwitchKey")
            .field("params", &self.params.name)
            .field("rows", &self.rows.len())
            .finish()
    }
}

impl Clone for PackingKeySwitchKey {
    fn clone(&self) -> Self {
        Self::from_rows(self.params.clone(), self.rows.clone()).expect("validated")
    }
}

impl PartialEq for PackingKeySwitchKey {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params && self.rows == other.rows
    }
}

impl PackingKeySwitchKey {
    pub fn generate<R: Rng + ?Sized>(key: &SecretKey, rng: &mut R) -> Self {
        let params = key.params.clone();
        let g = params.ks_gadget;
        let mut rows = Vec::with_capacity(params.n * g.levels());
        for &s in key.lwe_key() {
            for t in 1..=g.levels() {
                let mut c = key.encrypt_zero(rng);
                c.b.coeffs_mut()[0] = c.b.coeffs()[0].wrapping_add(s.wrapping_mul(g.weight(t)));
                rows.push(c);
            }
        }
        Self { params, rows, spectra: OnceLock::new() }
    }

    pub fn from_rows(params: HeParams, rows: Vec<RlweCiphertext>) -> Result<Self> {
        let expected = params.n * params.ks_gadget.levels();
        if rows.len() != expected {
            return Err(crate::Error::Dimension { expected, found: rows.len() });
        }
        Ok(Self { params, rows, spectra: OnceLock::new() })
    }

    pub fn params(&self) -> &HeParams {
        &self.params
    }

    pub fn rows(&self) -> &[RlweCiphertext] {
        &self.rows
    }

    pub(crate) fn spectra(&self) -> &[[FourierPoly; 2]] {
        self.spectra.get_or_init(|| {
            let plan = fft::plan(self.params.n);
            self.rows
                .iter()
                .map(|c| [plan.forward_u64_new(c.a.coeffs()), plan.forward_u64_new(c.b.coeffs())])
                .collect()
        })
    }
}

/// Deterministic key generation from a 64-bit seed.
pub fn keygen(params: &HeParams, seed: u64) -> Result<(SecretKey, PackingKeySwitchKey)> {
    params.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let bits: Vec<u64> = (0..params.n).map(|_| rng.random_range(0..2)).collect();
    let sk = SecretKey::from_bits(params, &bits)?;
    let ksk = PackingKeySwitchKey::generate(&sk, &mut rng);
    Ok((sk, ksk))
}
