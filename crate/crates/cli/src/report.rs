//! Report assembly and emission.
//!
//! The JSON layout is {"metadata": {...}, "report": {...}}. Everything
//! deterministic lives under "report"; wall time is quarantined under
//! "metadata" so byte comparison of reports just drops that one key.
//! serde_json's default map is ordered, so serialization is stable.

use num_rational::BigRational;
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;

/// Exit classes per the surface contract: Pass = 0, Fail = 1, Unknown = 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitClass {
    Pass,
    Fail,
    Unknown,
}

impl ExitClass {
    pub fn code(self) -> i32 {
        match self {
            ExitClass::Pass => 0,
            ExitClass::Fail => 1,
            ExitClass::Unknown => 2,
        }
    }
}

pub struct Outcome {
    pub verdict: &'static str,
    pub exit: ExitClass,
    pub payload: Value,
    pub thresholds: Value,
    pub csv: Option<String>,
}

/// Finite floats stay numbers; infinities and NaN become strings, since
/// JSON has no spelling for them.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn rat(q: &BigRational) -> Value {
    json!(format!("{}/{}", q.numer(), q.denom()))
}

pub fn rat_point(p: &[BigRational]) -> Value {
    Value::Array(p.iter().map(rat).collect())
}

pub fn num_list(vs: &[f64]) -> Value {
    Value::Array(vs.iter().map(|&v| num(v)).collect())
}

pub struct Emitter {
    started: Instant,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
}

impl Emitter {
    pub fn new(out: Option<PathBuf>, csv: Option<PathBuf>) -> Self {
        Emitter { started: Instant::now(), out, csv }
    }

    /// Writes the report (file or stdout) and the optional CSV, and returns
    /// the process exit code.
    pub fn finish(
        self,
        command: &str,
        config: Value,
        outcome: Outcome,
    ) -> Result<i32, String> {
        let mut report = Map::new();
        report.insert("schema_version".into(), json!(SCHEMA_VERSION));
        report.insert("tool".into(), json!("carleman"));
        report.insert("tool_version".into(), json!(env!("CARGO_PKG_VERSION")));
        report.insert("command".into(), json!(command));
        report.insert("config".into(), config);
        report.insert("verdict".into(), json!(outcome.verdict));
        report.insert("thresholds".into(), outcome.thresholds);
        report.insert("payload".into(), outcome.payload);

        let full = json!({
            "metadata": {
                "wall_time_ms": self.started.elapsed().as_millis() as u64,
            },
            "report": Value::Object(report),
        });
        let text = serde_json::to_string_pretty(&full).map_err(|e| e.to_string())? + "\n";

        match &self.out {
            Some(path) => {
                std::fs::write(path, &text).map_err(|e| format!("writing {path:?}: {e}"))?
            }
            None => {
                std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| format!("writing report: {e}"))?;
            }
        }
        if let Some(path) = &self.csv {
            match &outcome.csv {
                Some(rows) => std::fs::write(path, rows)
                    .map_err(|e| format!("writing {path:?}: {e}"))?,
                None => return Err("this command has no CSV table".into()),
            }
        }
        Ok(outcome.exit.code())
    }
}

/// Builds a CSV document from a header and stringified rows.
pub fn csv_table(header: &str, rows: &[Vec<String>]) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Shortest round-trip decimal for CSV cells.
pub fn csv_f64(v: f64) -> String {
    if v.is_finite() {
        let mut buf = ryu_like(v);
        if !buf.contains('.') && !buf.contains('e') && !buf.contains("inf") {
            buf.push_str(".0");
        }
        buf
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn ryu_like(v: f64) -> String {
    // serde_json uses ryu internally; route through it for the identical
    // shortest representation in CSV and JSON
    serde_json::to_string(&v).unwrap_or_else(|_| format!("{v}"))
}
