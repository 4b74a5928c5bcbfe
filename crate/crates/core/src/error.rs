use std::io;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("ring dimension must be a power of two, got {0}")]
    NotPowerOfTwo(usize),

    #[error("message {value} does not fit the plaintext modulus {modulus}")]
    Encoding { value: u64, modulus: u64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parameter set {0} is insecure and was not explicitly allowed")]
    InsecureNotAllowed(String),

    #[error("expected {expected} selector bits, found {found}")]
    Arity { expected: usize, found: usize },

    #[error("index {index} out of range 0..{bound}")]
    OutOfRange { index: usize, bound: usize },

    #[error("selector bit must be encrypted: {0}")]
    ClearSelector(&'static str),

    #[error("incompatible operands: {0}")]
    Mismatch(String),

    #[error("label {label} exceeds class count {classes}")]
    Label { label: usize, classes: usize },

    #[error("class {0} has no training samples; balancing is undefined")]
    EmptyClass(usize),

    #[error("invalid file: {0}")]
    Format(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
