use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for {bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("invalid excitation: {0}")]
    InvalidExcitation(String),

    #[error("generator strings do not mutually commute; refusing to Trotterize")]
    UnsupportedGenerator,

    #[error("operator is not Hermitian (max imaginary coefficient {0:.3e})")]
    NotHermitian(f64),

    #[error("size cap exceeded: {n} qubits > {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error("Lanczos did not converge after {iterations} iterations (best {energy}, residual {residual:.3e})")]
    Convergence {
        energy: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("metric solve failed after regularization ({0})")]
    SingularMetric(String),

    #[error("invalid block partition: {0}")]
    InvalidPartition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("logic error: {0}")]
    Logic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
