use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input vector is empty")]
    EmptyInput,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("singular 2x2 matrix (|det| = {0:e})")]
    Singular(f64),

    #[error("invalid value for `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("waveform has zero power")]
    ZeroWaveform,

    #[error("tone index {index} outside 1..={count}")]
    ToneOutOfRange { index: usize, count: usize },

    #[error("config line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },

    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("config is missing required key `{0}`")]
    MissingKey(&'static str),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
