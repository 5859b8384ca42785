//! Error type shared by the whole library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParam { name: &'static str, message: String },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("matrix is not symmetric: max |A - A^T| = {deviation:.3e} exceeds {tolerance:.3e}")]
    AsymmetricMatrix { deviation: f64, tolerance: f64 },

    #[error("unsupported spectrum: eigenvalue {0} lies outside [0, inf)")]
    UnsupportedSpectrum(f64),

    #[error("bound undefined: requires d_min > 0, got {0}")]
    BoundUndefined(f64),

    #[error("bound not applicable: requires gamma = 0, got gamma = {0}")]
    BoundNotApplicable(f64),

    #[error("no closed-form optimal relaxation parameter for {0}")]
    NoClosedForm(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("factorization failed: zero pivot at row {pivot}")]
    Factorization { pivot: usize },

    #[error("too few iterations recorded: need at least {needed}, have {have}")]
    TooFewIterations { needed: usize, have: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed matrix file: {0}")]
    MalformedMatrix(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
