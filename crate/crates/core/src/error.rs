use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: need at least {required} values, got {available}")]
    InsufficientData { required: usize, available: usize },

    #[error("timestamps not strictly increasing at index {index}")]
    Ordering { index: usize },

    #[error("pairing error: {0}")]
    Pairing(String),

    #[error("no car-following samples survived cleaning")]
    NoCarFollowing,

    #[error("split error: {0}")]
    Split(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("coefficient of variation undefined: mean is zero")]
    UndefinedCv,

    #[error("NRMSE undefined: observed series is all zero")]
    NrmseUndefined,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short stable identifier used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::InsufficientData { .. } => "insufficient_data",
            Error::Ordering { .. } => "ordering",
            Error::Pairing(_) => "pairing",
            Error::NoCarFollowing => "no_car_following",
            Error::Split(_) => "split",
            Error::UndefinedCorrelation(_) => "undefined_correlation",
            Error::UndefinedCv => "undefined_cv",
            Error::NrmseUndefined => "nrmse_undefined",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Parse(_) => "parse",
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
