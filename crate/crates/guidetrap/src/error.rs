use thiserror::Error;

/// Failure kinds shared by all modules. Nonexistence of a mode is a verdict, never an error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("orientation error: {0}")]
    Orientation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("conditioning error: {0}")]
    Conditioning(String),
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("assembly error: {0}")]
    Assembly(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("singular matrix (reciprocal pivot ratio {0:e})")]
    Singular(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
