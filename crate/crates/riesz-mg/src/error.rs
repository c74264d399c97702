use thiserror::Error;

/// Errors produced by operator assembly, preconditioner construction and solvers.
#[derive(Debug, Error)]
pub enum RieszError {
    #[error("fractional order must lie in (1, 2], got {0}")]
    InvalidOrder(f64),
    #[error("invalid size: {0}")]
    Size(String),
    #[error("vector length {got} does not match operator size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("symbol has a pole at x = 0")]
    Pole,
    #[error("preconditioner is indefinite: eigenvalue {0} is not positive")]
    IndefinitePreconditioner(f64),
    #[error("zero diagonal entry at index {0}")]
    ZeroDiagonal(usize),
    #[error("CG breakdown: search direction has nonpositive curvature p'Ap = {0}")]
    IndefiniteOperator(f64),
    #[error("eigenvalue iteration did not converge within {0} iterations")]
    EigNonConvergence(usize),
    #[error("malformed PGM: {0}")]
    PgmFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, RieszError>;
