use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The model has zero average degree where a positive one is required.
    #[error("degenerate model: average degree is zero")]
    Degenerate,

    #[error("edge probability {0} exceeds 1")]
    ProbabilityOverflow(f64),

    #[error("partition error: {0}")]
    Partition(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{k} groups do not divide {n} vertices")]
    Divisibility { n: usize, k: usize },

    /// A search or Monte Carlo run would exceed its configured budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("sampling failed after {0} attempts")]
    SamplingFailure(u64),

    #[error("Sinkhorn projection did not converge in {0} iterations")]
    Projection(usize),

    #[error("no sign change of the threshold crossing for k = {0}")]
    NoCrossing(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
