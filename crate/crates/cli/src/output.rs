//! Report envelope and the three output formats.

use std::fmt::Write as _;

use heun_tridiag::report::{Check, Status, VerificationReport};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::OutputFormat;

pub const SCHEMA: &str = "heun-tridiag/1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct Output {
    pub command: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub report: VerificationReport,
    /// Named CSV tables; the first is the default for `--output csv`.
    pub tables: Vec<(&'static str, String)>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: &'static str,
    version: &'static str,
    command: &'static str,
    inputs: &'a Value,
    results: &'a Value,
    checks: &'a [Check],
    flags: &'a [String],
    conversions: &'a [String],
    passed: bool,
}

#[derive(Debug, thiserror::Error)]
#[error("unknown table {requested:?}; available: {available}")]
pub struct UnknownTable {
    pub requested: String,
    pub available: String,
}

impl Output {
    pub fn new(command: &'static str, inputs: Value) -> Self {
        Self {
            command,
            inputs,
            results: json!({}),
            report: VerificationReport::new(),
            tables: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.report.passed()
    }

    pub fn render(&self, format: OutputFormat, table: Option<&str>) -> Result<String, UnknownTable> {
        match format {
            OutputFormat::Json => Ok(self.json()),
            OutputFormat::Csv => self.csv(table),
            OutputFormat::Pretty => Ok(self.pretty()),
        }
    }

    fn json(&self) -> String {
        let env = Envelope {
            schema: SCHEMA,
            version: VERSION,
            command: self.command,
            inputs: &self.inputs,
            results: &self.results,
            checks: &self.report.checks,
            flags: &self.report.flags,
            conversions: &self.report.conversions,
            passed: self.passed(),
        };
        let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
        s.push('\n');
        s
    }

    fn csv(&self, table: Option<&str>) -> Result<String, UnknownTable> {
        match table {
            None => Ok(self.tables.first().map(|(_, t)| t.clone()).unwrap_or_else(|| checks_csv(&self.report))),
            Some("checks") => Ok(checks_csv(&self.report)),
            Some(name) => self
                .tables
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| UnknownTable {
                    requested: name.to_string(),
                    available: self
                        .tables
                        .iter()
                        .map(|(n, _)| *n)
                        .chain(["checks"])
                        .collect::<Vec<_>>()
                        .join(", "),
                }),
        }
    }

    fn pretty(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} ({SCHEMA})", self.command, VERSION);
        let _ = writeln!(out, "inputs:");
        write_value(&mut out, &self.inputs, 1);
        let _ = writeln!(out, "results:");
        write_value(&mut out, &self.results, 1);
        let _ = writeln!(out, "checks:");
        for c in &self.report.checks {
            let _ = writeln!(out, "  [{}] {}: {}", status_word(c.status), c.name, c.detail);
        }
        for f in &self.report.flags {
            let _ = writeln!(out, "  flag: {f}");
        }
        for c in &self.report.conversions {
            let _ = writeln!(out, "  conversion: {c}");
        }
        let total = self.report.checks.len();
        let failed = self.report.failures().count();
        let _ = writeln!(
            out,
            "{}: {} of {total} checks passed or skipped",
            if failed == 0 { "PASS" } else { "FAIL" },
            total - failed
        );
        out
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::Skipped => "skip",
    }
}

fn checks_csv(report: &VerificationReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "status", "detail"]).expect("in-memory write");
    for c in &report.checks {
        w.write_record([c.name.as_str(), status_word(c.status), c.detail.as_str()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                if is_scalar(v) {
                    let _ = writeln!(out, "{pad}{k}: {}", scalar(v));
                } else {
                    let _ = writeln!(out, "{pad}{k}:");
                    write_value(out, v, depth + 1);
                }
            }
        }
        Value::Array(items) if items.iter().all(is_scalar) => {
            let joined: Vec<_> = items.iter().map(scalar).collect();
            let _ = writeln!(out, "{pad}[{}]", joined.join(", "));
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                if is_scalar(v) {
                    let _ = writeln!(out, "{pad}- {}", scalar(v));
                } else {
                    let _ = writeln!(out, "{pad}- [{i}]");
                    write_value(out, v, depth + 1);
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other));
        }
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Object(_) | Value::Array(_)) || v.as_array().is_some_and(|a| a.iter().all(is_scalar) && a.len() <= 8)
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "null".into(),
        Value::Array(a) => format!("[{}]", a.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

#[derive(Serialize)]
struct ErrorEnvelope<'a> {
    schema: &'static str,
    version: &'static str,
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
}

/// Machine-readable error object printed on exit code 2.
pub fn error_object(kind: &str, message: &str) -> String {
    let env = ErrorEnvelope { schema: SCHEMA, version: VERSION, error: ErrorBody { kind, message } };
    let mut s = serde_json::to_string_pretty(&env).expect("error serializes");
    s.push('\n');
    s
}
