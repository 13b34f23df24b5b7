//! Running recognizers over bundles, one problem at a time or in parallel.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use goalrec_core::recognition::{
    extract_graphs, recognize_with_graphs, Method, PartitionTest, RecognitionResult, RecognizerConfig,
};
use rayon::prelude::*;
use walkdir::WalkDir;

use crate::bundle::{load_bundle, Bundle, BundlePaths, HYPS_FILE};
use crate::error::{HarnessError, Result};
use crate::metrics::{Failure, MetricsReport, Row};

/// Environment variable overriding the per-problem timeout, in seconds.
pub const TIMEOUT_ENV: &str = "GOALREC_TIMEOUT_S";
pub const DEFAULT_TIMEOUT_S: f64 = 1200.0;

pub fn default_timeout() -> Duration {
    std::env::var(TIMEOUT_ENV)
        .ok()
        .and_then(|v| v.parse::<f64>().ok())
        .filter(|s| *s > 0.0)
        .map_or(Duration::from_secs_f64(DEFAULT_TIMEOUT_S), Duration::from_secs_f64)
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub methods: Vec<Method>,
    pub thetas: Vec<f64>,
    /// Worker threads; 0 uses one per core.
    pub workers: usize,
    pub timeout: Duration,
    pub facts_obs: bool,
    pub include_disjunctive: bool,
    pub partition_test: PartitionTest,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            methods: Method::ALL.to_vec(),
            thetas: vec![0.0],
            workers: 0,
            timeout: default_timeout(),
            facts_obs: false,
            include_disjunctive: false,
            partition_test: PartitionTest::default(),
        }
    }
}

impl EvalConfig {
    fn recognizer(&self, theta: f64, deadline: Instant) -> RecognizerConfig {
        RecognizerConfig {
            theta,
            include_disjunctive: self.include_disjunctive,
            partition_test: self.partition_test,
            deadline: Some(deadline),
            ..RecognizerConfig::default()
        }
    }
}

/// Recognizes `bundle` with one method and threshold. Timing covers
/// landmark extraction and scoring.
pub fn run_problem(bundle: &Bundle, method: Method, theta: f64, timeout: Duration) -> Result<RecognitionResult> {
    let config = EvalConfig {
        methods: vec![method],
        thetas: vec![theta],
        timeout,
        ..EvalConfig::default()
    };
    let mut results = run_bundle(bundle, &config)?;
    Ok(results.remove(0))
}

/// Every method and threshold of `config` on one bundle. Landmarks are
/// extracted once and their cost is charged to every result.
pub fn run_bundle(bundle: &Bundle, config: &EvalConfig) -> Result<Vec<RecognitionResult>> {
    let deadline = Instant::now() + config.timeout;
    let start = Instant::now();
    let graphs = extract_graphs(&bundle.problem, &config.recognizer(0.0, deadline))?;
    let extraction_s = start.elapsed().as_secs_f64();
    let mut out = Vec::with_capacity(config.methods.len() * config.thetas.len());
    for &method in &config.methods {
        for &theta in &config.thetas {
            let mut r = recognize_with_graphs(&bundle.problem, &graphs, method, &config.recognizer(theta, deadline))?;
            r.timing.extraction_s = extraction_s;
            out.push(r);
        }
    }
    Ok(out)
}

pub fn rows_for(bundle: &Bundle, results: &[RecognitionResult]) -> Result<Vec<Row>> {
    let real = bundle.real.ok_or(HarnessError::MissingRealGoal)?;
    Ok(results
        .iter()
        .map(|r| {
            Row::from_result(
                &bundle.name,
                bundle.domain_label(),
                bundle.observability(),
                bundle.problem.observations.len(),
                real,
                r,
            )
        })
        .collect())
}

/// Directories below `root` holding a hypotheses file, sorted.
pub fn discover_bundles(root: &Path) -> Result<Vec<PathBuf>> {
    let mut dirs: Vec<PathBuf> = WalkDir::new(root)
        .into_iter()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_file() && e.file_name() == HYPS_FILE)
        .filter_map(|e| e.path().parent().map(Path::to_path_buf))
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(HarnessError::NoBundles(root.to_path_buf()));
    }
    Ok(dirs)
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Invalid(e.to_string()))
}

fn failure(problem: &str, error: impl ToString) -> Failure {
    Failure {
        problem: problem.to_string(),
        method: None,
        theta: None,
        error: error.to_string(),
    }
}

/// Evaluates loaded bundles in parallel; row order follows `bundles`.
pub fn evaluate_bundles(bundles: &[Bundle], config: &EvalConfig) -> Result<MetricsReport> {
    let outcomes: Vec<Result<Vec<Row>>> = pool(config.workers)?.install(|| {
        bundles
            .par_iter()
            .map(|b| run_bundle(b, config).and_then(|rs| rows_for(b, &rs)))
            .collect()
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (b, o) in bundles.iter().zip(outcomes) {
        match o {
            Ok(r) => rows.extend(r),
            Err(e) => {
                log::warn!("{}: {e}", b.name);
                failures.push(failure(&b.name, e));
            }
        }
    }
    Ok(MetricsReport::from_rows(rows, failures))
}

/// Loads and evaluates every bundle below `root`.
pub fn evaluate(root: &Path, config: &EvalConfig) -> Result<MetricsReport> {
    let dirs = discover_bundles(root)?;
    let loaded: Vec<(PathBuf, Result<Bundle>)> = pool(config.workers)?.install(|| {
        dirs.par_iter()
            .map(|d| {
                let b = load_bundle(&BundlePaths::in_dir(d), config.facts_obs).map(|mut b| {
                    b.name = d.strip_prefix(root).unwrap_or(d).display().to_string();
                    b
                });
                (d.clone(), b)
            })
            .collect()
    });
    let mut bundles = Vec::new();
    let mut load_failures = Vec::new();
    for (d, b) in loaded {
        match b {
            Ok(b) => bundles.push(b),
            Err(e) => {
                log::warn!("{}: {e}", d.display());
                load_failures.push(failure(&d.display().to_string(), e));
            }
        }
    }
    let mut report = evaluate_bundles(&bundles, config)?;
    load_failures.append(&mut report.failures);
    report.failures = load_failures;
    Ok(report)
}
