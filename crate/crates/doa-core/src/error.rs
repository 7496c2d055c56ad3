use thiserror::Error;

/// Errors surfaced by the core estimation pipeline.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Angle outside the array's field of definition.
    #[error("angle {0} deg outside [-90, 90]")]
    AngleOutOfRange(f64),
    /// Steering derivative is degenerate at endfire (cos theta = 0).
    #[error("angle {0} deg at or beyond endfire; derivative undefined")]
    EndfireDerivative(f64),
    #[error("empty angle list")]
    EmptyAngles,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// A solver iterate became non-finite; reports the first bad iteration.
    #[error("solver diverged: non-finite value at iteration {0}")]
    Divergence(usize),
    #[error("requested {k} picks from a {n}-row matrix")]
    TooManyPicks { k: usize, n: usize },
    #[error("refinement failed: {0}")]
    RefinementFailed(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
