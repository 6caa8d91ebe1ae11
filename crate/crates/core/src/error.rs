use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {what} at {index}")]
    NonFinite { what: &'static str, index: String },

    #[error("score of {kind} undefined at x[{row},{col}] = {value} (outside support)")]
    ScoreDomain {
        kind: String,
        row: usize,
        col: usize,
        value: f64,
    },

    #[error("{0} is outside the domain of the function")]
    Domain(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("{routine} did not converge within {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("matrix is singular: {0}")]
    Singular(String),

    #[error("linear program for column {column} is infeasible")]
    Infeasible { column: usize },

    #[error("linear program hit the iteration limit ({0} pivots)")]
    LpIterationLimit(usize),

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("cannot normalize the zero vector")]
    ZeroVector,

    #[error("first coordinate is zero, sign of the direction is undefined")]
    ZeroFirstCoordinate,

    #[error("column {0} of the estimate is zero")]
    ZeroColumn(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("at n={n}, replication={replication}: {source}")]
    Replication {
        n: usize,
        replication: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("bootstrap replicate {rep}: {source}")]
    Bootstrap {
        rep: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] io::Error),
}

impl Error {
    /// True for failures of the numerical kernels rather than of the input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NoConvergence { .. }
            | Error::Singular(_)
            | Error::Infeasible { .. }
            | Error::LpIterationLimit(_)
            | Error::Unbounded
            | Error::ZeroVector
            | Error::ZeroFirstCoordinate
            | Error::ZeroColumn(_)
            | Error::ScoreDomain { .. }
            | Error::NotSymmetric(_) => true,
            Error::Replication { source, .. } | Error::Bootstrap { source, .. } => {
                source.is_numerical()
            }
            _ => false,
        }
    }
}
