use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the sampler toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis already spans {columns} of {dim} dimensions; appending would leave no nullspace")]
    BasisFull { columns: usize, dim: usize },

    #[error("cannot normalize a zero-length vector")]
    ZeroVector,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("log density at the starting point is not finite ({0})")]
    NonFiniteStart(f64),

    #[error(
        "no proposal accepted after {max_crumbs} crumbs on target `{target}` \
         (sigma_c = {sigma_c}, theta = {theta}) from x0 = {x0:?}"
    )]
    MaxCrumbs {
        target: String,
        x0: Vec<f64>,
        sigma_c: f64,
        theta: f64,
        max_crumbs: usize,
    },

    #[error("at iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("autocorrelation time inestimable: {0}")]
    Inestimable(String),

    #[error("finite-difference stencil leaves the support at coordinate {0}")]
    StencilOutOfSupport(usize),

    #[error("invalid data in {path}: {message}")]
    Data { path: PathBuf, message: String },

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Innermost error, skipping iteration annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtIteration { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
