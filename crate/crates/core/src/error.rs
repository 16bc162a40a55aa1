use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    /// The requested construction does not exist in this parameter regime.
    #[error("regime error: {0}")]
    Regime(String),

    /// A hypothesis that must be certified before a construction could not be.
    #[error("hypothesis not certified: {0}")]
    Hypothesis(String),

    #[error("resonant tail: ratio {0} coincides with a root of the symbol")]
    Resonant(String),

    #[error("certificate does not verify: {0}")]
    Verification(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Hypothesis(_) => 2,
            Error::Regime(_) => 3,
            Error::Io(_) | Error::Csv(_) => 4,
            _ => 1,
        }
    }
}
