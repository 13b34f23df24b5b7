//! CSV and JSON emission of metrics reports.

use std::io::{Read, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::metrics::{Aggregate, Failure, MetricsReport, Row};

pub const CSV_HEADER: [&str; 10] = [
    "problem",
    "domain",
    "observability",
    "num_goals",
    "num_obs",
    "method",
    "theta",
    "time_s",
    "correct",
    "spread",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(HarnessError::Invalid(format!("unknown report format `{s}`"))),
        }
    }
}

fn fixed(x: f64) -> String {
    format!("{x:.3}")
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

pub fn write_csv<W: Write>(report: &MetricsReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &report.rows {
        w.write_record([
            r.problem.clone(),
            r.domain.clone(),
            r.observability.map(fixed).unwrap_or_default(),
            r.num_goals.to_string(),
            r.num_obs.to_string(),
            r.method.to_string(),
            fixed(r.theta),
            fixed(r.time_s),
            r.correct.to_string(),
            r.spread.to_string(),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::Csv(e.into()))?;
    Ok(())
}

/// Parses rows written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<Row>> {
    let mut rd = csv::Reader::from_reader(input);
    let bad = |field: &str, value: &str| HarnessError::Invalid(format!("bad {field} `{value}`"));
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let get = |i: usize| rec.get(i).unwrap_or_default();
        let num = |i: usize| get(i).parse::<f64>().map_err(|_| bad(CSV_HEADER[i], get(i)));
        let count = |i: usize| get(i).parse::<usize>().map_err(|_| bad(CSV_HEADER[i], get(i)));
        rows.push(Row {
            problem: get(0).to_string(),
            domain: get(1).to_string(),
            observability: if get(2).is_empty() { None } else { Some(num(2)?) },
            num_goals: count(3)?,
            num_obs: count(4)?,
            method: get(5).parse().map_err(|_| bad("method", get(5)))?,
            theta: num(6)?,
            time_s: num(7)?,
            correct: get(8).parse().map_err(|_| bad("correct", get(8)))?,
            spread: count(9)?,
        });
    }
    Ok(rows)
}

#[derive(Serialize)]
struct JsonReport<'a> {
    rows: Vec<Row>,
    aggregates: Vec<Aggregate>,
    failures: &'a [Failure],
}

pub fn write_json<W: Write>(report: &MetricsReport, mut out: W) -> Result<()> {
    let rows = report
        .rows
        .iter()
        .map(|r| Row {
            observability: r.observability.map(round3),
            theta: round3(r.theta),
            time_s: round3(r.time_s),
            ..r.clone()
        })
        .collect();
    let aggregates = report
        .aggregates
        .iter()
        .map(|a| Aggregate {
            observability: a.observability.map(round3),
            theta: round3(a.theta),
            accuracy: round3(a.accuracy),
            mean_spread: round3(a.mean_spread),
            mean_time_s: round3(a.mean_time_s),
            tpr: round3(a.tpr),
            fpr: round3(a.fpr),
            ..a.clone()
        })
        .collect();
    let doc = JsonReport {
        rows,
        aggregates,
        failures: &report.failures,
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out).map_err(|e| HarnessError::Invalid(e.to_string()))?;
    Ok(())
}

pub fn write_report<W: Write>(report: &MetricsReport, format: ReportFormat, out: W) -> Result<()> {
    match format {
        ReportFormat::Csv => write_csv(report, out),
        ReportFormat::Json => write_json(report, out),
    }
}

#[cfg(test)]
mod tests {
    use goalrec_core::recognition::Method;

    use super::*;

    fn sample() -> Row {
        Row {
            problem: "blocks/p01".into(),
            domain: "blocks".into(),
            observability: Some(0.5),
            num_goals: 20,
            num_obs: 7,
            method: Method::Gc,
            theta: 0.1,
            time_s: 0.0213,
            correct: true,
            spread: 3,
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&MetricsReport::default(), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "problem,domain,observability,num_goals,num_obs,method,theta,time_s,correct,spread\n"
        );
    }

    #[test]
    fn row_line_and_round_trip() {
        let report = MetricsReport::from_rows(vec![sample()], vec![]);
        let mut buf = Vec::new();
        write_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "blocks/p01,blocks,0.500,20,7,gc,0.100,0.021,true,3");
        let rows = read_csv(text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].spread, 3);
        assert_eq!(rows[0].time_s, 0.021);
    }

    #[test]
    fn json_has_rows_and_aggregates() {
        let report = MetricsReport::from_rows(vec![sample()], vec![]);
        let mut buf = Vec::new();
        write_json(&report, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 1);
        assert_eq!(v["rows"][0]["time_s"], 0.021);
        assert_eq!(v["aggregates"][0]["accuracy"], 1.0);
    }
}
