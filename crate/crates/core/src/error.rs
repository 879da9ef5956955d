use thiserror::Error;

/// Errors raised by manifold, word and group operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    /// A coordinate vector does not represent a point of the manifold.
    #[error("invalid point representation: {0}")]
    Representation(String),

    /// Two points are not joined by a unique minimal geodesic.
    #[error("no unique minimal geodesic between the given points: {0}")]
    Uniqueness(String),

    /// A trajectory or query left the coordinate domain of a chart.
    #[error("chart domain exited: {0}")]
    Domain(String),

    /// The metric tensor failed to be symmetric positive definite.
    #[error("metric is not positive definite at {0:?}")]
    Geometry(Vec<f64>),

    /// The shooting method did not reach the boundary tolerance.
    #[error("shooting did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("words live on different manifolds")]
    ManifoldMismatch,

    #[error("basepoint mismatch")]
    BasepointMismatch,

    /// A word fails validity at the pair starting at `index` (storage order, head first).
    #[error("invalid word at index {index}: {reason}")]
    Validity { index: usize, reason: String },

    #[error("wrong word species: expected {expected}, found {found}")]
    Species { expected: String, found: String },

    /// A point lies outside the domain of a local trivialization.
    #[error("point lies outside the chart neighborhood (distance {distance}, radius {radius})")]
    ChartDomain { distance: f64, radius: f64 },

    #[error("subdivision budget of {budget} hops exhausted")]
    Subdivision { budget: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant not supported on this manifold: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, GeoError>;
