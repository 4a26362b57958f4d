use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is numerically rank deficient (|r_kk| = {pivot:e}, threshold {threshold:e})")]
    RankDeficient { pivot: f64, threshold: f64 },

    #[error("symmetric eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix is not positive semi-definite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },

    #[error("spectrum outside [0, 1] (eigenvalue {eigenvalue:e})")]
    SpectrumOutOfRange { eigenvalue: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
}
