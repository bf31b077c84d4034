use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported matrix dimension {0} (expected 2 or 3)")]
    InvalidDimension(usize),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("determinant deviates from 1 by {0:e}")]
    NotSpecialLinear(f64),
    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not traceless (|tr| = {0:e})")]
    NotTraceless(f64),
    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("spectrum mismatch (defect {0:e})")]
    SpectrumMismatch(f64),
    #[error("matrix is not diagonalizable ({0})")]
    NotDiagonalizable(String),
    #[error("element is not regular (minimum eigenvalue gap {0:e})")]
    NotRegular(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("too few factors: m + n = {0}, need at least 2")]
    TooFewFactors(usize),
    #[error("generator index {index} out of range for {len} components")]
    IndexOutOfRange { index: i64, len: usize },
    #[error("Lie algebra basis elements are linearly dependent")]
    LinearlyDependent,
    #[error("invalid surface data: {0}")]
    InvalidSurface(String),
}
