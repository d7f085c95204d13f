use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid pair ({i}, {j}) for a graph with {n} vertices")]
    InvalidPair { i: usize, j: usize, n: usize },

    #[error("edge ({0}, {1}) is a self-loop or out of range")]
    InvalidEdge(usize, usize),

    #[error("no acceptable instance with n={n} after {attempts} attempts (last rejection: {condition})")]
    Generation {
        n: usize,
        attempts: usize,
        condition: String,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("forward cache is stale: network was updated after the forward pass")]
    StaleCache,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("scaling initializer requires stored coordinates for the instance")]
    MissingCoordinates,

    #[error("alpha update requested with an infeasible report")]
    InfeasibleReport,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
