use thiserror::Error;

/// Errors raised by tensor construction, the solvers and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape {0:?}: order must be at least 1 and every dimension positive")]
    InvalidShape(Vec<usize>),

    #[error("data length {got} does not match shape {shape:?} (expected {expected})")]
    LengthMismatch {
        shape: Vec<usize>,
        expected: usize,
        got: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("mode {mode} out of range for a tensor of order {order}")]
    ModeOutOfRange { mode: usize, order: usize },

    #[error("non-finite value at flat position {0}")]
    NonFinite(usize),

    #[error("tensor is not symmetric: entry {index:?} differs from its sorted permutation")]
    NotSymmetric { index: Vec<usize> },

    #[error("shape {0:?} is not cubical")]
    NotCubical(Vec<usize>),

    #[error("negative entry {value} at {index:?}")]
    Negative { index: Vec<usize>, value: f64 },

    #[error("non-positive entry {value} at {index:?}")]
    NotPositive { index: Vec<usize>, value: f64 },

    #[error("the zero tensor has no isolated stationary pairs")]
    ZeroTensor,

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate iteration: {0}")]
    Degenerate(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("all {0} restarts failed")]
    AllRestartsFailed(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("continuum of eigenvectors detected: {found} classes exceed the bound {bound} for isolated eigenpairs")]
    Continuum { found: usize, bound: usize },

    #[error("characteristic polynomial vanishes identically; no certificate can be issued")]
    Indeterminate,

    #[error("malformed tensor file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
