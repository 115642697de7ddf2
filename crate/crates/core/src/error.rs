use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("threshold t = {t} is outside [0, {n}]")]
    ThresholdOutOfRange { n: u64, t: u64 },

    #[error("degenerate threshold: M = 2^{n}, the log(2^n - M) term is undefined")]
    DegenerateThreshold { n: u64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("trace = {trace:.12} is not 1 within tolerance")]
    TraceNotUnit { trace: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue = {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("basis vectors are not orthonormal: max deviation {deviation:.3e}")]
    NotOrthonormal { deviation: f64 },

    #[error("d = {d} is not a prime power >= 2")]
    NotPrimePower { d: u32 },

    #[error("operation requires basis family {expected}, got {actual}")]
    WrongFamily {
        expected: &'static str,
        actual: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
