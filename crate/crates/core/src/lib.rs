//! Weightless neural networks trained and evaluated over TFHE-encrypted data.
//!
//! The plaintext model in [`wnn`] is the reference; [`he_wnn`] runs the same
//! training and inference with the input bits encrypted as RGSW ciphertexts and
//! the RAM counters held as encrypted lookup tables.

pub mod config;
pub mod datasets;
pub mod error;
pub mod he_wnn;
pub mod io;
pub mod lut;
pub mod ring;
pub mod tfhe;
pub mod wnn;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/ring.md")]
    mod ring {}
    #[doc = include_str!("../../../book/src/tfhe.md")]
    mod tfhe {}
    #[doc = include_str!("../../../book/src/lookup-tables.md")]
    mod lookup_tables {}
    #[doc = include_str!("../../../book/src/wisard.md")]
    mod wisard {}
    #[doc = include_str!("../../../book/src/encrypted.md")]
    mod encrypted {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
