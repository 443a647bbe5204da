use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation, e.g. a
    /// pseudo-observation on the boundary of the unit cube.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ill-conditioned correlation matrix: {0}")]
    IllConditioned(String),

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate scale: sample standard deviation is zero")]
    DegenerateScale,

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("no convergence after {iterations} iterations (gradient norm {grad_norm:e})")]
    Convergence {
        iterations: usize,
        grad_norm: f64,
        last: Vec<f64>,
    },

    #[error("all Monte-Carlo weights underflowed for observation {observation}")]
    Underflow { observation: usize },

    #[error("divergence at iteration {iteration}: non-finite gradient")]
    Divergence {
        iteration: usize,
        trace: Box<crate::bocr::FitTrace>,
    },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("singular design matrix")]
    SingularDesign,

    #[error("parse error: {0}")]
    Parse(String),
}
