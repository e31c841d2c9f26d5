use thiserror::Error;

use crate::bipartite::BipartiteDims;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid bipartite dimensions: {0}")]
    InvalidDims(String),

    #[error("eigensolver did not converge for a {0}x{0} matrix")]
    EigenNoConvergence(usize),

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix does not have unit trace (trace {0})")]
    BadTrace(f64),

    #[error("matrix is not an orthogonal projector (|P^2 - P| = {0:e})")]
    NotProjector(f64),

    #[error("state is not PPT for {dims} (minimum eigenvalue of the partial transpose {min_eigenvalue:e})")]
    NotPpt {
        dims: BipartiteDims,
        min_eigenvalue: f64,
    },

    #[error("invalid tolerances: {0}")]
    InvalidTolerances(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("borderline spectrum: eigenvalue {eigenvalue:e} lies within the ambiguity band below the unit-eigenvalue threshold")]
    Borderline { eigenvalue: f64 },

    #[error("face is extremal (rank 1); no search direction exists")]
    NoDirection,

    #[error("line search did not reach the boundary before |x| = {0:e}")]
    Unbounded(f64),

    #[error("step did not reduce either rank: ({n}, {m}) -> ({new_n}, {new_m})")]
    NoRankDrop {
        n: usize,
        m: usize,
        new_n: usize,
        new_m: usize,
    },

    #[error("search exceeded {0} iterations")]
    IterationCap(usize),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("unknown state identifier: {0}")]
    UnknownState(String),

    #[error("malformed matrix file: {0}")]
    MatrixFile(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
