use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("operator on {0} qubits exceeds the configured maximum of {1}")]
    TooManyQubits(usize, usize),
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("operator is not a projector (max |P^2 - P| = {0:.3e})")]
    NotProjector(f64),
    #[error("state norm {0} is not 1")]
    NotNormalized(f64),
    #[error("qubit index {0} out of range for {1} qubits")]
    QubitOutOfRange(usize, usize),
    #[error("invalid measurement setting: {0}")]
    InvalidSetting(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unsupported circuit preparation: {0}")]
    UnsupportedPreparation(String),
    #[error("rng required for noisy simulation")]
    MissingRng,
    #[error("shot or trajectory count must be >= 1")]
    NoShots,
}

impl Error {
    /// Stable single-word category, used by the CLI for machine-parseable
    /// error reporting.
    pub fn category(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(..) | Error::NotPowerOfTwo(_) => "dimension",
            Error::TooManyQubits(..) | Error::QubitOutOfRange(..) => "qubit-range",
            Error::NotHermitian(_) | Error::NotProjector(_) | Error::NotNormalized(_) => {
                "structure"
            }
            Error::InvalidSetting(_) => "setting",
            Error::InvalidConfig(_) => "config",
            Error::UnsupportedPreparation(_) => "preparation",
            Error::MissingRng | Error::NoShots => "sampling",
        }
    }
}
