use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Numerical(#[from] ritzbound_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    /// Process exit status: 2 for bad input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        use ritzbound_core::Error as E;
        match self {
            HarnessError::Numerical(
                E::Parse(_) | E::NotSquare { .. } | E::NonFinite | E::NotSymmetric { .. } | E::DimensionMismatch { .. } | E::DimensionError(_),
            ) => 2,
            HarnessError::Numerical(_) => 3,
            _ => 2,
        }
    }
}
