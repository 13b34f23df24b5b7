use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] goalrec_core::Error),
    #[error("template has no `<HYPOTHESIS>` placeholder")]
    MissingPlaceholder,
    #[error("no hypotheses in the hypotheses file")]
    NoHypotheses,
    #[error("real hypothesis {0} is not among the hypotheses")]
    RealGoalNotFound(String),
    #[error("bundle has no real hypothesis")]
    MissingRealGoal,
    #[error("no bundles found under {}", .0.display())]
    NoBundles(PathBuf),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

impl From<goalrec_core::pddl::ParseError> for HarnessError {
    fn from(e: goalrec_core::pddl::ParseError) -> Self {
        HarnessError::Core(e.into())
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> HarnessError {
    let path = path.into();
    move |source| HarnessError::Io { path, source }
}
