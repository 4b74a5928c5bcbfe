//! TFHE over `q = 2^64`: keys, LWE/RLWE/RGSW ciphertexts, the external
//! product and everything built from it.
//!
//! There is a single secret, the binary RLWE key `S1`. LWE ciphertexts only
//! arise from coefficient extraction and live under the coefficient vector of
//! `S1`, so no small-dimension LWE key or LWE-to-LWE key switch exists.

mod ciphertext;
mod keys;
mod noise;
mod ops;
mod params;

pub use ciphertext::{
    dec_lwe, dec_rgsw, dec_rlwe, decode, enc_rgsw, enc_rgsw_seeded, enc_rlwe, trivial_rgsw, FourierRgsw, LweCiphertext,
    RgswCiphertext, RlweCiphertext, SeededRgsw,
};
pub use keys::{keygen, PackingKeySwitchKey, SecretKey, PRNG_ID};
pub use noise::{lwe_error, measure_noise, measure_noise_against, phase_error, NoiseBudget};
pub use ops::{blind_rotate, cmux, cmux_rotate, external_product, external_product_add, extract_lwe, packing_key_switch};
pub use params::{HeParams, MIN_SECURE_N, SIGMA_REL_DEFAULT};
