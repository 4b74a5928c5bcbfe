use super::ciphertext::round_div;
use super::{HeParams, LweCiphertext, RlweCiphertext, SecretKey};

/// Largest distance between a phase and its target encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoiseBudget {
    pub max_error: u64,
    /// `q/(2p)`: decryption is correct while `max_error` stays below this.
    pub margin: u64,
}

impl NoiseBudget {
    pub fn decrypts(&self) -> bool {
        self.max_error < self.margin
    }

    pub fn log2_error(&self) -> f64 {
        (self.max_error as f64).max(1.0).log2()
    }

    /// Bits of headroom left, `log2(margin / max_error)`.
    pub fn headroom_bits(&self) -> f64 {
        (self.margin as f64).log2() - self.log2_error()
    }
}

fn centered(x: u64) -> u64 {
    (x as i64).unsigned_abs()
}

/// Signed distance of `phase` from the nearest multiple of `q/p`.
pub fn phase_error(phase: u64, params: &HeParams) -> i64 {
    let shift = 64 - params.p_log;
    let nearest = round_div(phase, shift) << shift;
    phase.wrapping_sub(nearest) as i64
}

/// Error relative to the nearest valid encoding of each coefficient.
pub fn measure_noise(c: &RlweCiphertext, key: &SecretKey) -> NoiseBudget {
    let params = key.params();
    let max_error = key
        .phase(c)
        .coeffs()
        .iter()
        .map(|&x| phase_error(x, params).unsigned_abs())
        .max()
        .unwrap_or(0);
    NoiseBudget { max_error, margin: params.margin() }
}

/// Error relative to the encoding of a known message.
pub fn measure_noise_against(c: &RlweCiphertext, expected: &[u64], key: &SecretKey) -> NoiseBudget {
    let params = key.params();
    let max_error = key
        .phase(c)
        .coeffs()
        .iter()
        .zip(expected)
        .map(|(&x, &m)| centered(x.wrapping_sub(m.wrapping_mul(params.delta()))))
        .max()
        .unwrap_or(0);
    NoiseBudget { max_error, margin: params.margin() }
}

/// Signed error of an LWE ciphertext relative to a known message.
pub fn lwe_error(c: &LweCiphertext, expected: u64, key: &SecretKey) -> i64 {
    c.phase(key).wrapping_sub(expected.wrapping_mul(key.params().delta())) as i64
}
