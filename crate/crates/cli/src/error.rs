use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Lib(#[from] hewisard::Error),

    #[error("{0}")]
    Diagnostics(String),
}

impl CliError {
    /// 2 for usage, 3 for unreadable or inconsistent data, 4 when decryption
    /// diagnostics flag a result as unreliable.
    pub fn exit_code(&self) -> i32 {
        use hewisard::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Diagnostics(_) => 4,
            CliError::Lib(e) => match e {
                E::InsecureNotAllowed(_) | E::InvalidParams(_) => 2,
                E::Io(_)
                | E::Format(_)
                | E::Parse(_)
                | E::Label { .. }
                | E::EmptyClass(_)
                | E::Mismatch(_)
                | E::Dimension { .. }
                | E::Arity { .. } => 3,
                _ => 1,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
