use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates a model constraint.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("unknown walk model `{0}`")]
    UnknownWalk(String),

    #[error("unknown scenery `{0}`")]
    UnknownScenery(String),

    /// The walk has no critical-case normalization constant.
    #[error("walk model `{0}` is not in the critical regime (no constant A)")]
    NotCritical(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("enumeration needs {terms:e} terms, over the guard of {guard:e}")]
    Explosion { terms: f64, guard: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
