//! Plaintext WiSARD with integer RAMs.
//!
//! Everything here doubles as the reference for the encrypted pipeline: the
//! homomorphic model must decrypt to exactly the counters [`train_integer`]
//! produces, and client-side finalization reuses [`score_classes`].

mod activation;
mod model;
mod preprocess;

pub use activation::{activate, argmax, evaluate, score_classes, ActivatedModel, ActivationSpec, Metrics};
pub use model::{merge, train_integer, ClassCounts, IntegerWisardModel};
pub use preprocess::{quantize, thermometer_encode, PreprocessSpec, Quantizer, Thermometer, ThermometerKind};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

/// Identifier stored with every model for the permutation generator below.
pub const PERMUTATION_PRNG_ID: &str = "chacha20-fisher-yates-v1";

/// Shape of a WiSARD network.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WisardGeometry {
    /// Input bit count.
    pub s: usize,
    /// Class count.
    pub l: usize,
    /// Address size.
    pub a: usize,
    /// Permutation seed.
    pub r: u64,
    /// `log2(p)` of the counter modulus.
    pub p_log: u32,
}

impl WisardGeometry {
    pub fn new(s: usize, l: usize, a: usize, r: u64, p_log: u32) -> Result<Self> {
        let g = Self { s, l, a, r, p_log };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 || self.l < 2 || self.a == 0 || self.a > 24 {
            return Err(Error::InvalidParams(format!(
                "geometry needs s > 0, l >= 2 and 0 < a <= 24 (got s={}, l={}, a={})",
                self.s, self.l, self.a
            )));
        }
        if self.p_log == 0 || self.p_log > 32 {
            return Err(Error::InvalidParams(format!("counter modulus 2^{} unsupported", self.p_log)));
        }
        Ok(())
    }

    /// RAM count `⌈s/a⌉`.
    pub fn k0(&self) -> usize {
        self.s.div_ceil(self.a)
    }

    /// `⌈log2 l⌉`.
    pub fn label_bits(&self) -> usize {
        self.l.next_power_of_two().trailing_zeros() as usize
    }

    /// Selector bits of one RAM table: label bits above address bits.
    pub fn lut_bits(&self) -> usize {
        self.label_bits() + self.a
    }

    pub fn ram_size(&self) -> usize {
        1 << self.a
    }

    pub fn p(&self) -> u64 {
        1u64 << self.p_log
    }
}

fn uniform_below(rng: &mut ChaCha20Rng, bound: u64) -> u64 {
    // Rejection keeps the draw unbiased.
    let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return v % bound;
        }
    }
}

/// Deterministic bijection on `0..s`; the permuted input is `x'_i = x[perm[i]]`.
pub fn permutation(r: u64, s: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..s).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(r);
    for i in (1..s).rev() {
        let j = uniform_below(&mut rng, i as u64 + 1) as usize;
        perm.swap(i, j);
    }
    perm
}

/// Address of RAM `d`: `Σ_i x_{i + a·d} 2^i`, reading bits past the end as zero.
pub fn f_comp(x: &[bool], d: usize, a: usize) -> usize {
    (0..a).filter(|&i| x.get(i + a * d).copied().unwrap_or(false)).fold(0, |acc, i| acc | 1 << i)
}

/// Applies the permutation and returns all `k0` RAM addresses.
pub fn addresses(x: &[bool], perm: &[usize], a: usize) -> Vec<usize> {
    let permuted: Vec<bool> = perm.iter().map(|&i| x[i]).collect();
    (0..perm.len().div_ceil(a)).map(|d| f_comp(&permuted, d, a)).collect()
}
