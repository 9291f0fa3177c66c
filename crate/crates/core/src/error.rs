use thiserror::Error;

/// Errors raised by the density algebra, the assignment solvers and the filter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },

    #[error("no Beta distribution has mean {mean} and variance {variance}")]
    InvalidMoments { mean: f64, variance: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("innovation covariance is singular")]
    SingularCovariance,

    #[error("assignment infeasible: row {row} has no admissible column")]
    Infeasible { row: usize },

    #[error("empty mixture")]
    EmptyMixture,

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn dims(rows: usize, cols: usize) -> String {
    format!("{rows}x{cols}")
}
