//! CSV and JSON encodings of a diagnose run.
//!
//! Both encodings serialise the same [`Summary`] values, and floats are
//! written in shortest round-trip form, so the two carry identical numbers.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::diagnostics::{DiagnosticReport, NStatus, TrendConfig, TrendEvidence};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;

use super::config::OutputFormat;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum NSpec {
    Range(String),
    List(Vec<u32>),
}

/// Fully resolved settings, printed at the head of every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub command: &'static str,
    pub family: String,
    pub tests: Vec<String>,
    pub n: NSpec,
    pub points: Vec<String>,
    pub thresholds: TrendConfig,
    pub quadrature: QuadratureConfig,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub n: u32,
    pub reason: String,
}

/// Per-test fields beyond the raw values and the verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary<'a> {
    pub params: &'a BTreeMap<String, f64>,
    pub evidence: Option<TrendEvidence>,
    pub c_hat: Option<f64>,
    pub cross_check: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<Failure>,
}

/// A report with the id under which it is emitted.
#[derive(Debug, Clone)]
pub struct Record {
    pub id: String,
    pub report: DiagnosticReport,
}

impl Record {
    fn summary(&self) -> Summary<'_> {
        let r = &self.report;
        Summary {
            params: &r.params,
            evidence: r.verdict.evidence,
            c_hat: r.c_hat,
            cross_check: r.cross_check,
            failures: r
                .values
                .iter()
                .filter_map(|v| {
                    v.failure.as_ref().map(|reason| Failure {
                        n: v.n,
                        reason: reason.clone(),
                    })
                })
                .collect(),
        }
    }
}

/// Ids are test names, suffixed `#1`, `#2`, ... when a test ran more than
/// once.
pub fn assign_ids(reports: Vec<DiagnosticReport>) -> Vec<Record> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for r in &reports {
        *counts.entry(r.test.clone()).or_default() += 1;
    }
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    reports
        .into_iter()
        .map(|report| {
            let k = seen.entry(report.test.clone()).or_default();
            *k += 1;
            let id = if counts[&report.test] > 1 {
                format!("{}#{}", report.test, k)
            } else {
                report.test.clone()
            };
            Record { id, report }
        })
        .collect()
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Internal(format!("cannot serialise report: {e}"))
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Internal(format!("cannot write report: {e}"))
}

pub fn write_csv(out: &mut dyn Write, config: &ResolvedConfig, records: &[Record]) -> Result<()> {
    writeln!(out, "# config: {}", serde_json::to_string(config).map_err(json_err)?).map_err(io_err)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["test", "n", "value", "status"]).map_err(io_err)?;
    let mut buf = ryu::Buffer::new();
    for rec in records {
        for v in &rec.report.values {
            let value = match v.value {
                Some(x) => buf.format_finite(x).to_string(),
                None => String::new(),
            };
            w.write_record([rec.id.as_str(), &v.n.to_string(), &value, v.status.as_str()])
                .map_err(io_err)?;
        }
        let summary = serde_json::to_string(&rec.summary()).map_err(json_err)?;
        w.write_record([rec.id.as_str(), "summary", rec.report.verdict.class.as_str(), &summary])
            .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

#[derive(Serialize)]
struct JsonValue {
    n: u32,
    value: Option<f64>,
    status: NStatus,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    test: &'a str,
    values: Vec<JsonValue>,
    verdict: &'static str,
    #[serde(flatten)]
    summary: Summary<'a>,
}

#[derive(Serialize)]
struct JsonRun<'a> {
    config: &'a ResolvedConfig,
    reports: Vec<JsonReport<'a>>,
}

pub fn write_json(out: &mut dyn Write, config: &ResolvedConfig, records: &[Record]) -> Result<()> {
    let run = JsonRun {
        config,
        reports: records
            .iter()
            .map(|rec| JsonReport {
                test: &rec.id,
                values: rec
                    .report
                    .values
                    .iter()
                    .map(|v| JsonValue {
                        n: v.n,
                        value: v.value,
                        status: v.status,
                    })
                    .collect(),
                verdict: rec.report.verdict.class.as_str(),
                summary: rec.summary(),
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *out, &run).map_err(json_err)?;
    writeln!(out).map_err(io_err)
}

pub fn write_report(out: &mut dyn Write, config: &ResolvedConfig, records: &[Record]) -> Result<()> {
    match config.format {
        OutputFormat::Csv => write_csv(out, config, records),
        OutputFormat::Json => write_json(out, config, records),
    }
}
