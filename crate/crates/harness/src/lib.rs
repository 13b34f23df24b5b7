//! Dataset bundles, problem generators, batch evaluation and metrics for
//! landmark-based goal recognition.

pub mod bundle;
pub mod dataset;
pub mod error;
pub mod evaluate;
pub mod metrics;
pub mod report;
pub mod suite;

pub use bundle::{load_bundle, load_bundle_files, Bundle, BundleFiles, BundlePaths};
pub use error::{HarnessError, Result};
pub use evaluate::{evaluate, evaluate_bundles, run_problem, EvalConfig};
pub use metrics::{MetricsReport, Row};
