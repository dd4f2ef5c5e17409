use thiserror::Error;

/// Errors surfaced by checkers, selectors and pipelines.
///
/// Every variant maps to one of the command-line exit codes through
/// [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("{what}: size {size} exceeds the exact-mode limit {limit}")]
    SizeLimitExceeded { what: String, size: usize, limit: usize },

    #[error("{what}: {needed:.3e} enumeration steps exceed the budget {cap:.3e}")]
    BudgetExceeded { what: String, needed: f64, cap: f64 },

    #[error("internal invariant broken: {0}")]
    InternalInvariantBroken(String),

    #[error("selection failed in round {round} after {attempts} candidates; failing: {failing:?}")]
    SelectionFailed { round: usize, attempts: usize, failing: Vec<String> },

    #[error("extension stuck at label {label}: back-neighbour images {back_images:?}, {candidates} candidates before removing used vertices")]
    ExtensionStuck { label: usize, back_images: Vec<usize>, candidates: usize },

    #[error("pipeline failed at {stage} {index}: {cause}")]
    PipelineFailed { stage: String, index: usize, cause: Box<Error> },

    #[error("random bipartition rejected {attempts} times (relative minimum degree below {needed:.4})")]
    PartitionRejected { attempts: usize, needed: f64 },

    #[error("backbone not found: {0}")]
    BackboneNotFound(String),

    #[error("balancing failed after {trials} trials; best worst-class size {best_worst} exceeds {bound:.2}")]
    BalancingFailed { trials: usize, best_worst: usize, bound: f64 },

    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),

    #[error("retries exhausted: {0}")]
    RetryExhausted(String),

    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    ///
    /// 3 for pipeline/selection failures; 4 for violated preconditions,
    /// budget problems and unreadable or malformed input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PreconditionViolated(_)
            | Error::SizeLimitExceeded { .. }
            | Error::BudgetExceeded { .. }
            | Error::InfeasibleParams(_)
            | Error::DegenerateDenominator(_)
            | Error::Schema(_)
            | Error::Io(_)
            | Error::Json(_) => 4,
            Error::SelectionFailed { .. }
            | Error::ExtensionStuck { .. }
            | Error::PipelineFailed { .. }
            | Error::PartitionRejected { .. }
            | Error::BackboneNotFound(_)
            | Error::BalancingFailed { .. }
            | Error::RetryExhausted(_)
            | Error::InternalInvariantBroken(_) => 3,
        }
    }

    pub(crate) fn wrap(stage: &str, index: usize, cause: Error) -> Error {
        Error::PipelineFailed { stage: stage.to_string(), index, cause: Box::new(cause) }
    }
}
