use thiserror::Error;

/// Failures raised by kernel, factorization, sampling and dilation routines.
///
/// Numerical quantities carried by variants are widened to `f64` so the
/// error type does not depend on the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("block ({i},{j}) is not the adjoint of block ({j},{i}) (deviation {deviation:e})")]
    NotHermitian { i: usize, j: usize, deviation: f64 },

    #[error("missing block ({i},{j}) and its adjoint")]
    MissingBlock { i: usize, j: usize },

    #[error("invalid probability weights: {0}")]
    InvalidWeights(String),

    #[error("eigensolver failed to converge on a {0}x{0} matrix")]
    NumericalFailure(usize),

    #[error("kernel is not positive definite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("diagonal block at point {point} is not Hermitian")]
    NonHermitianDiagonal { point: usize },

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("points are not the consecutive integers 0..M (found {0:?})")]
    NonConsecutivePoints(String),

    #[error("coordinate index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("coordinate index set is empty")]
    EmptyIndexSet,

    #[error("shift domination violated (minimum eigenvalue of K - K_shift is {min_eigenvalue:e})")]
    ShiftDominationViolated { min_eigenvalue: f64 },

    #[error("shift operator is ill-conditioned (residual {residual:e})")]
    IllConditioned { residual: f64 },

    #[error("polynomial has no coefficients")]
    EmptyPolynomial,

    #[error("a sampler-backed random kernel needs a Monte Carlo sample budget")]
    MissingSampleBudget,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
