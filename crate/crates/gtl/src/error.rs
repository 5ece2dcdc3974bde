use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {x} lies outside [0, 1]")]
    Domain { x: f64 },

    #[error("bandwidth {m_frak} exceeds the half sample count {n}")]
    Aliasing { m_frak: usize, n: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("quadrature tolerance not met after {panels} panels (best estimate {estimate:e})")]
    ToleranceNotMet { estimate: f64, panels: usize },

    #[error("alias series did not settle within {cap} shells")]
    AliasOverflow { cap: usize },

    #[error("local average {value:e} is too small to divide by")]
    DegenerateDenominator { value: f64 },

    #[error("nonvanishing condition violated: minimum {eta:e} on the diagonal band")]
    Nonvanishing { eta: f64 },

    #[error("unknown graphon `{0}`")]
    UnknownGraphon(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("format: {0}")]
    Format(String),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}
