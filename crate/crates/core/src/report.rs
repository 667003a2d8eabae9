//! Run statistics, the status display and the JSON report file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, IoOp, Result};

pub const STATUS_SENTENCE: &str = "SRr has performed the text mining operations on input file";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSummary {
    pub name: String,
    pub records: u64,
    pub bytes: u64,
}

/// Totals and per-key counters for one partition run.
///
/// Field order here is the JSON object key order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub input_path: String,
    pub records_read: u64,
    pub records_routed: u64,
    pub malformed_count: u64,
    pub per_key: BTreeMap<String, u64>,
    /// Sorted ascending by name.
    pub files: Vec<FileSummary>,
    pub duration_ms: u64,
}

impl RunReport {
    pub fn files_created(&self) -> usize {
        self.files.len()
    }

    pub fn file(&self, name: &str) -> Option<&FileSummary> {
        self.files.iter().find(|f| f.name == name)
    }

    /// Check the count algebra and ordering invariants.
    pub fn validate(&self) -> Result<(), String> {
        if self.records_read != self.records_routed + self.malformed_count {
            return Err(format!(
                "records_read {} != records_routed {} + malformed_count {}",
                self.records_read, self.records_routed, self.malformed_count
            ));
        }
        let per_key: u64 = self.per_key.values().sum();
        if per_key != self.records_routed {
            return Err(format!(
                "per-key total {per_key} != records_routed {}",
                self.records_routed
            ));
        }
        let per_file: u64 = self.files.iter().map(|f| f.records).sum();
        if per_file != self.records_routed {
            return Err(format!(
                "per-file total {per_file} != records_routed {}",
                self.records_routed
            ));
        }
        if !self.files.windows(2).all(|w| w[0].name < w[1].name) {
            return Err("files not sorted by name".to_owned());
        }
        Ok(())
    }

    /// The report with timing zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> RunReport {
        RunReport {
            duration_ms: 0,
            ..self.clone()
        }
    }
}

pub fn render_status(report: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, " {STATUS_SENTENCE}");
    let _ = writeln!(out, "input:          {}", report.input_path);
    let _ = writeln!(out, "records read:   {}", report.records_read);
    let _ = writeln!(out, "records routed: {}", report.records_routed);
    let _ = writeln!(out, "malformed:      {}", report.malformed_count);
    let _ = writeln!(out, "files created:  {}", report.files_created());
    let _ = writeln!(out, "elapsed:        {} ms", report.duration_ms);

    let width = report
        .per_key
        .keys()
        .map(|k| k.chars().count())
        .max()
        .unwrap_or(0)
        .max("key".len());
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<width$}  records", "key");
    for (key, count) in &report.per_key {
        let _ = writeln!(out, "{key:<width$}  {count}");
    }
    out
}

pub fn to_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<RunReport> {
    Ok(serde_json::from_str(text)?)
}

pub fn write_report(report: &RunReport, path: &Path) -> Result<()> {
    fs::write(path, to_json(report)).map_err(|e| Error::io(IoOp::WriteReport, path, e))
}

pub fn read_report(path: &Path) -> Result<RunReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(IoOp::ReadReport, path, e))?;
    from_json(&text)
}
