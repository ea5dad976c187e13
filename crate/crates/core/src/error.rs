use thiserror::Error;

pub type Result<T, E = ChordError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChordError {
    #[error("phase-space dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("noise strength epsilon = {0} is outside [0, 1]")]
    EpsilonOutOfRange(f64),

    #[error("degenerate line: n1 = n2 = 0 (mod {n})")]
    DegenerateLine { n: usize },

    #[error("line {n1}*p = {n2}*q + {n3} (mod {n}) has no solutions")]
    EmptyLine { n1: i64, n2: i64, n3: i64, n: usize },

    #[error("sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),

    #[error("weight table has negative entry {value} at {point}")]
    NegativeWeight { point: String, value: f64 },

    #[error("weight table sums to {sum}, expected {expected}")]
    WeightNormalization { sum: f64, expected: f64 },

    #[error("state vector has norm {0}, expected 1")]
    NotNormalized(f64),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("density matrix has trace {0}, expected 1")]
    TraceNotOne(f64),

    #[error("density matrix has negative eigenvalue {0:e}")]
    NotPositive(f64),

    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("linear map [[{a}, {b}], [{c}, {d}]] has determinant {det}, expected 1")]
    NotUnimodular { a: i64, b: i64, c: i64, d: i64, det: i64 },

    #[error("cannot quantize map on N = {n}: {reason}")]
    Unquantizable { n: usize, reason: String },

    #[error("N = {n} exceeds the limit {max} for {what}")]
    ScaleGuard { n: usize, max: usize, what: &'static str },

    #[error("truncated propagator requires a Gaussian channel")]
    NotGaussian,

    #[error("truncation coefficient must be positive and finite, got {0}")]
    InvalidTruncation(f64),

    #[error("requested {count} eigenvalues but only {available} are available")]
    CountTooLarge { count: usize, available: usize },

    #[error("eigensolver failed: {0}")]
    EigenSolver(String),
}
