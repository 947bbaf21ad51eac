use thiserror::Error;

/// Failure modes shared by every kernel, extraction and bound.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not symmetric (relative skew {skew:.3e})")]
    NotSymmetric { skew: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid dimensions: {0}")]
    DimensionError(String),
    #[error("Jacobi iteration did not converge within {rotations} rotations (off-diagonal {off_diagonal:.3e})")]
    NoConvergence { rotations: usize, off_diagonal: f64 },
    #[error("columns are rank deficient at column {column} (pivot {pivot:.3e})")]
    RankDeficient { column: usize, pivot: f64 },
    #[error("columns are not orthonormal (deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },
    #[error("zero vector")]
    ZeroVector,
    #[error("shift {sigma} is numerically an eigenvalue (gap {gap:.3e})")]
    SingularShift { sigma: f64, gap: f64 },
    #[error("matrix is numerically singular (smallest |eigenvalue| {min_abs:.3e})")]
    SingularMatrix { min_abs: f64 },
    #[error("matrix is not positive definite (smallest eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("Cholesky factorization failed at pivot {pivot}")]
    CholeskyFailure { pivot: usize },
    #[error("reduced harmonic problem has complex eigenvalues (imaginary part {imag:.3e})")]
    ComplexHarmonicValues { imag: f64 },
    #[error("no finite extracted value to pair with")]
    NoFinitePair,
    #[error("requested {requested} extracted values, only {available} finite")]
    InsufficientFiniteValues { requested: usize, available: usize },
    #[error("empty value set")]
    EmptySet,
    #[error("{value} is not an eigenvalue of the matrix")]
    NotAnEigenvalue { value: f64 },
    #[error("subspace is not contained in the given basis (residual {residual:.3e})")]
    SubspaceNotContained { residual: f64 },
    #[error("basis does not span an invariant subspace (residual {residual:.3e})")]
    NotInvariant { residual: f64 },
    #[error("preconditioner does not commute with the matrix (relative residual {residual:.3e})")]
    NotCommuting { residual: f64 },
    #[error("polynomial value {value:.3e} at eigenvalue {eigenvalue} is not positive")]
    NotPositiveOnSpectrum { eigenvalue: f64, value: f64 },
    #[error("projected shifted matrix B is singular (smallest |eigenvalue| {min_abs:.3e})")]
    SingularB { min_abs: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
