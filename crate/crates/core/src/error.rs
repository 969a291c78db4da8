use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("point is outside the closed cross-section: {0}")]
    OutsideCrossSection(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mesh rejected: {0}")]
    Mesh(String),

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("eigenvector is not of one sign: {0}")]
    SignChange(String),

    #[error("inconsistent spectral input: {0}")]
    InconsistentSpectrum(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
