use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("singular input: {0}")]
    SingularInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge ({context}): best estimate {best:e}, error estimate {error:e}")]
    Convergence {
        context: String,
        best: f64,
        error: f64,
    },

    #[error("size error: {0}")]
    Size(String),

    #[error("divergent integral: {0}")]
    Divergence(String),

    #[error("matrix is not positive semidefinite: eigenvalue {value:e} below -{tolerance:e}")]
    NotPsd { value: f64, tolerance: f64 },

    #[error("extrapolation did not converge: {0}")]
    Extrapolation(String),

    #[error("realization {realization} at spacing {spacing}: {source}")]
    Realization {
        spacing: f64,
        realization: usize,
        source: Box<Error>,
    },

    #[error("frequency grid too coarse: {0}")]
    Resolution(String),

    #[error("at rho={rho:e} cm, omega={omega:e} rad/s: {source}")]
    GridPoint {
        rho: f64,
        omega: f64,
        source: Box<Error>,
    },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("{path}: cannot read config: {source}")]
    Unreadable {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },

    #[error("duplicate key `{key}` on lines {first} and {second}")]
    DuplicateKey {
        key: String,
        first: usize,
        second: usize,
    },

    #[error("missing required key `{0}`")]
    MissingKey(&'static str),

    #[error("line {line}: bad unit suffix `{suffix}` for `{key}` (expected `{expected}`)")]
    BadUnitSuffix {
        key: String,
        line: usize,
        suffix: String,
        expected: &'static str,
    },

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field,
            reason: reason.into(),
        }
    }
}
