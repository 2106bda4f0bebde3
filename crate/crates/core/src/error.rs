use thiserror::Error;

/// Errors raised by the numerical kernel and the geometry built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spectral function undefined at eigenvalue {eigenvalue}")]
    Domain { eigenvalue: f64 },

    #[error("Schatten exponent must be >= 1, got {0}")]
    InvalidNorm(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is numerically rank deficient (min eigenvalue {min_eig:e}, scale {scale:e})")]
    RankDeficient { min_eig: f64, scale: f64 },

    #[error("imaginary part Y is not positive definite (min eigenvalue {min_eig:e})")]
    DegenerateY { min_eig: f64 },

    #[error("degenerate point: {0}")]
    DegeneratePoint(&'static str),

    #[error("Z + iI is singular; Cayley transform undefined")]
    SingularCayley,

    #[error("I - W is singular; the preimage is a point at infinity")]
    BoundaryPole,

    #[error("Y has eigenvalue {min_eig:e} below the PSD tolerance")]
    NotPsd { min_eig: f64 },

    #[error("matrix is not symmetric (mismatch {mismatch:e})")]
    Asymmetry { mismatch: f64 },

    #[error("ball point has operator norm {norm}, outside the admissible ball")]
    OutsideBall { norm: f64 },

    #[error("lambda = {lambda} is outside the admissible interval [{lo}, {hi}]")]
    OutOfInterval { lambda: f64, lo: f64, hi: f64 },

    #[error("Mobius denominator sin*Z + cos is singular")]
    SingularDenominator,

    #[error("sequence data would produce a non-symmetric real part (mismatch {mismatch:e})")]
    AsymmetricX { mismatch: f64 },

    #[error("case {0} is impossible; no witness sequence exists")]
    InfeasibleCase(String),

    #[error("case {0} is not impossible; falsifier sampling does not apply")]
    NotImpossibleCase(String),

    #[error("malformed input: {0}")]
    Schema(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(&'static str),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
