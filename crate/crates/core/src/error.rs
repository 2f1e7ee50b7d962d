use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate reflector: direction has zero norm")]
    DegenerateReflector,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not orthogonal: ||VᵀV - I||_F = {residual:.3e} exceeds {tolerance:.3e}")]
    NotOrthogonal { residual: f64, tolerance: f64 },

    #[error("matrix is not symmetric: ||A - Aᵀ||_F = {residual:.3e} exceeds {tolerance:.3e}")]
    NotSymmetric { residual: f64, tolerance: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("eigensolver failed to converge")]
    NoConvergence,

    #[error("instance too large: n = {n} exceeds enumeration cap {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("no common candidate: data is not consistent with a single reflector and binary coefficients")]
    NoSolution,

    #[error("underdetermined: no column constrains the reflector")]
    Underdetermined,

    #[error("ambiguous recovery: {candidates} candidate reflectors remain")]
    Ambiguous { candidates: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
