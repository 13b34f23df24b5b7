use thiserror::Error;

use crate::pddl::ParseError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("action {action} is not applicable: missing {missing}")]
    PreconditionViolation { action: String, missing: String },
    #[error("goal is not relaxed-solvable: {0}")]
    UnsolvableGoal(String),
    #[error("observation `{0}` does not match any grounded action")]
    UnknownAction(String),
    #[error("search space exhausted without reaching the goal")]
    SearchExhausted,
    #[error("node budget of {0} expansions exceeded")]
    NodeBudgetExceeded(usize),
    #[error("requested {requested} noise actions but only {available} non-plan actions exist")]
    InsufficientNoise { requested: usize, available: usize },
    #[error("invalid observation spec: {0}")]
    InvalidSpec(String),
    #[error("invalid landmark graph: {0}")]
    InvalidGraph(String),
    #[error("recognition deadline exceeded")]
    DeadlineExceeded,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
