use thiserror::Error;

/// Which side of a minimum a level-set crossing was searched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Lower => f.write_str("lower"),
            Side::Upper => f.write_str("upper"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite: pivot {pivot} at row {row} (raise precision or lower the order)")]
    NotPositiveDefinite { row: usize, pivot: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("iteration did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("recurrence breakdown at lattice point ({m}, {n}): vanishing divisor")]
    RecurrenceBreakdown { m: usize, n: usize },

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("transfer table does not cover the monomial at basis index {0}")]
    CoverageMismatch(usize),

    #[error("derivative has no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: String, hi: String },

    #[error("minimum sequence has not converged: {0}")]
    NotConverged(String),

    #[error("no {0} crossing of the upper bound inside the scan domain")]
    NoUpperCrossing(Side),

    #[error("energy outside the valid domain: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
