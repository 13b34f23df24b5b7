//! Per-problem rows and their aggregates: accuracy, spread, time and ROC
//! points.

use std::collections::BTreeMap;

use goalrec_core::recognition::{Method, RecognitionResult};
use serde::{Deserialize, Serialize};

/// One recognizer run on one problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub problem: String,
    pub domain: String,
    pub observability: Option<f64>,
    pub num_goals: usize,
    pub num_obs: usize,
    pub method: Method,
    pub theta: f64,
    pub time_s: f64,
    /// The real goal is in the returned set.
    pub correct: bool,
    /// Size of the returned set.
    pub spread: usize,
}

impl Row {
    pub fn from_result(
        problem: &str,
        domain: &str,
        observability: Option<f64>,
        num_obs: usize,
        real: usize,
        result: &RecognitionResult,
    ) -> Self {
        Row {
            problem: problem.to_string(),
            domain: domain.to_string(),
            observability,
            num_goals: result.goals.len(),
            num_obs,
            method: result.method,
            theta: result.theta,
            time_s: result.timing.total_s(),
            correct: result.is_returned(real),
            spread: result.returned.len(),
        }
    }

    /// Share of wrong goals returned: `(spread - [correct]) / (|goals| - 1)`.
    pub fn false_positive_rate(&self) -> f64 {
        if self.num_goals <= 1 {
            return 0.0;
        }
        (self.spread - usize::from(self.correct)) as f64 / (self.num_goals - 1) as f64
    }
}

/// A failed run, excluded from the aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub problem: String,
    pub method: Option<Method>,
    pub theta: Option<f64>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub domain: String,
    pub observability: Option<f64>,
    pub method: Method,
    pub theta: f64,
    pub problems: usize,
    pub accuracy: f64,
    pub mean_spread: f64,
    pub mean_time_s: f64,
    /// ROC point: true positive rate equals accuracy.
    pub tpr: f64,
    pub fpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct MetricsReport {
    pub rows: Vec<Row>,
    pub aggregates: Vec<Aggregate>,
    pub failures: Vec<Failure>,
}

fn milli(x: f64) -> i64 {
    (x * 1000.0).round() as i64
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Summary over a set of rows.
pub fn summarize<'a>(rows: impl IntoIterator<Item = &'a Row> + Clone) -> (usize, f64, f64, f64, f64) {
    let n = rows.clone().into_iter().count();
    let acc = mean(rows.clone().into_iter().map(|r| f64::from(u8::from(r.correct))));
    let spread = mean(rows.clone().into_iter().map(|r| r.spread as f64));
    let time = mean(rows.clone().into_iter().map(|r| r.time_s));
    let fpr = mean(rows.into_iter().map(Row::false_positive_rate));
    (n, acc, spread, time, fpr)
}

/// Fraction of rows whose returned set holds the real goal.
pub fn accuracy<'a>(rows: impl IntoIterator<Item = &'a Row> + Clone) -> f64 {
    summarize(rows).1
}

impl MetricsReport {
    /// Groups rows by domain, observability, method and threshold.
    pub fn from_rows(rows: Vec<Row>, failures: Vec<Failure>) -> Self {
        let mut groups: BTreeMap<(String, Option<i64>, Method, i64), Vec<&Row>> = BTreeMap::new();
        for r in &rows {
            groups
                .entry((r.domain.clone(), r.observability.map(milli), r.method, milli(r.theta)))
                .or_default()
                .push(r);
        }
        let aggregates = groups
            .into_values()
            .map(|g| {
                let (problems, acc, spread, time, fpr) = summarize(g.iter().copied());
                Aggregate {
                    domain: g[0].domain.clone(),
                    observability: g[0].observability,
                    method: g[0].method,
                    theta: g[0].theta,
                    problems,
                    accuracy: acc,
                    mean_spread: spread,
                    mean_time_s: time,
                    tpr: acc,
                    fpr,
                }
            })
            .collect();
        MetricsReport {
            rows,
            aggregates,
            failures,
        }
    }

    pub fn rows_for(&self, method: Method, theta: f64) -> impl Iterator<Item = &Row> + Clone {
        self.rows
            .iter()
            .filter(move |r| r.method == method && milli(r.theta) == milli(theta))
    }

    pub fn accuracy(&self, method: Method, theta: f64) -> f64 {
        accuracy(self.rows_for(method, theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(correct: bool, spread: usize) -> Row {
        Row {
            problem: "p".into(),
            domain: "blocks".into(),
            observability: Some(0.5),
            num_goals: 5,
            num_obs: 4,
            method: Method::Gc,
            theta: 0.1,
            time_s: 0.02,
            correct,
            spread,
        }
    }

    #[test]
    fn false_positive_rate_excludes_the_real_goal() {
        assert_eq!(row(true, 1).false_positive_rate(), 0.0);
        assert_eq!(row(true, 3).false_positive_rate(), 0.5);
        assert_eq!(row(false, 2).false_positive_rate(), 0.5);
    }

    #[test]
    fn aggregates_group_rows() {
        let mut other = row(false, 2);
        other.theta = 0.2;
        let report = MetricsReport::from_rows(vec![row(true, 1), row(false, 3), other], vec![]);
        assert_eq!(report.aggregates.len(), 2);
        let a = &report.aggregates[0];
        assert_eq!((a.problems, a.accuracy, a.mean_spread), (2, 0.5, 2.0));
        assert_eq!(report.accuracy(Method::Gc, 0.2), 0.0);
        assert_eq!(MetricsReport::from_rows(vec![row(true, 1)], vec![]).aggregates[0].accuracy, 1.0);
    }
}
