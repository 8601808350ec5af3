use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |H - H^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("kets are not orthonormal: max Gram deviation = {deviation:e}")]
    NotOrthonormal { deviation: f64 },

    #[error("vector is not normalized: norm = {norm}")]
    NotUnit { norm: f64 },

    #[error("non-finite entry in matrix")]
    NonFinite,

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("dimension {0} is not prime")]
    NotPrime(usize),

    #[error("{n} mutually unbiased bases requested, at most {max} exist in dimension {d}")]
    TooManyBases { n: usize, d: usize, max: usize },

    #[error("q = {q} outside the admissible interval [0, {max}]")]
    QOutOfRange { q: f64, max: f64 },

    #[error("observable set is empty")]
    EmptySet,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
