//! The single-pass partition loop.
//!
//! Lines are scanned one at a time from a buffered reader, parsed, keyed and
//! appended to the sink for their key. Only the current record is held in
//! memory; per-run state grows with the number of distinct keys and the pool
//! capacity, never with the input size.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, IoOp, MalformedReason, Result};
use crate::keying::{extract_key, sanitize_stem, target_filename, KeySpec};
use crate::record_codec::{
    parse_record, render_into, strip_terminator, Delimiter, ParseMode, ParsedRecord, RenderMode,
};
use crate::report::{FileSummary, RunReport};
use crate::sink_pool::{Capacity, RunPolicy, SinkPool};

const READ_BUFFER: usize = 64 * 1024;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OnMalformed {
    #[default]
    Skip,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionConfig {
    pub input_path: PathBuf,
    pub output_dir: PathBuf,
    pub delimiter: Delimiter,
    pub key_spec: KeySpec,
    pub suffix: String,
    pub parse_mode: ParseMode,
    pub render_mode: RenderMode,
    pub pool_capacity: Capacity,
    pub on_malformed: OnMalformed,
    pub run_policy: RunPolicy,
}

impl PartitionConfig {
    /// A config with the reference tool's defaults: comma delimiter, key
    /// columns 0 and 2 joined by `_`, `.txt` suffix, legacy parse, paper render.
    pub fn new(input_path: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        PartitionConfig {
            input_path: input_path.into(),
            output_dir: output_dir.into(),
            delimiter: Delimiter::default(),
            key_spec: KeySpec::default(),
            suffix: ".txt".to_owned(),
            parse_mode: ParseMode::default(),
            render_mode: RenderMode::default(),
            pool_capacity: Capacity::default(),
            on_malformed: OnMalformed::default(),
            run_policy: RunPolicy::default(),
        }
    }
}

/// Instrumentation collected during a run. Not part of the report.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunMetrics {
    pub peak_buffered_records: usize,
    pub peak_open_sinks: usize,
    pub sink_opens: u64,
    pub evictions: u64,
    pub distinct_keys: usize,
}

/// Target filename for a record: the sanitized composite key plus suffix.
pub fn route(record: &ParsedRecord, config: &PartitionConfig) -> Result<String, MalformedReason> {
    let key = extract_key(record, &config.key_spec)?;
    Ok(target_filename(&sanitize_stem(key.text()), &config.suffix))
}

pub fn partition(config: &PartitionConfig) -> Result<RunReport> {
    partition_with_metrics(config).map(|(report, _)| report)
}

pub fn partition_with_metrics(config: &PartitionConfig) -> Result<(RunReport, RunMetrics)> {
    if config.suffix.contains(['/', '\\', '\0']) {
        return Err(Error::Config(format!(
            "suffix {:?} must not contain path separators",
            config.suffix
        )));
    }
    let input = File::open(&config.input_path)
        .map_err(|e| Error::io(IoOp::OpenInput, &config.input_path, e))?;
    fs::create_dir_all(&config.output_dir)
        .map_err(|e| Error::io(IoOp::CreateOutputDir, &config.output_dir, e))?;
    let guard = InputGuard::new(&config.input_path, &config.output_dir);

    Partitioner::new(config, guard).run(BufReader::with_capacity(READ_BUFFER, input))
}

/// Rejects targets that would overwrite the input file.
struct InputGuard {
    input: Option<PathBuf>,
    output_dir: Option<PathBuf>,
}

impl InputGuard {
    fn new(input: &Path, output_dir: &Path) -> Self {
        InputGuard {
            input: input.canonicalize().ok(),
            output_dir: output_dir.canonicalize().ok(),
        }
    }

    fn check(&self, filename: &str) -> Result<()> {
        if let (Some(input), Some(dir)) = (&self.input, &self.output_dir) {
            if dir.join(filename) == *input {
                return Err(Error::Config(format!(
                    "routing target {} is the input file",
                    input.display()
                )));
            }
        }
        Ok(())
    }
}

struct KeyEntry {
    filename: String,
    records: u64,
}

struct Partitioner<'a> {
    config: &'a PartitionConfig,
    guard: InputGuard,
    pool: SinkPool,
    keys: HashMap<Vec<u8>, KeyEntry>,
    in_flight: usize,
    metrics: RunMetrics,
    report: RunReport,
}

impl<'a> Partitioner<'a> {
    fn new(config: &'a PartitionConfig, guard: InputGuard) -> Self {
        Partitioner {
            config,
            guard,
            pool: SinkPool::new(&config.output_dir, config.pool_capacity, config.run_policy),
            keys: HashMap::new(),
            in_flight: 0,
            metrics: RunMetrics::default(),
            report: RunReport {
                input_path: config.input_path.display().to_string(),
                ..RunReport::default()
            },
        }
    }

    fn run(mut self, mut reader: impl BufRead) -> Result<(RunReport, RunMetrics)> {
        let started = Instant::now();
        let mut buf = Vec::with_capacity(256);
        let mut rendered = Vec::with_capacity(256);
        let mut line_number = 0u64;

        loop {
            buf.clear();
            let n = reader
                .read_until(b'\n', &mut buf)
                .map_err(|e| Error::io(IoOp::ReadInput, &self.config.input_path, e))?;
            if n == 0 {
                break;
            }
            line_number += 1;
            self.report.records_read += 1;

            let line = strip_terminator(&buf);
            let record = match parse_record(
                line,
                self.config.delimiter,
                self.config.parse_mode,
                line_number,
            ) {
                Ok(record) => record,
                Err(reason) => {
                    self.malformed(reason)?;
                    continue;
                }
            };
            self.in_flight += 1;
            self.metrics.peak_buffered_records =
                self.metrics.peak_buffered_records.max(self.in_flight);

            let key = match extract_key(&record, &self.config.key_spec) {
                Ok(key) => key,
                Err(reason) => {
                    self.in_flight -= 1;
                    self.malformed(reason)?;
                    continue;
                }
            };

            rendered.clear();
            render_into(&record, self.config.render_mode, &mut rendered);

            let entry = match self.keys.get_mut(key.text()) {
                Some(entry) => entry,
                None => {
                    let filename = target_filename(&sanitize_stem(key.text()), &self.config.suffix);
                    self.guard.check(&filename)?;
                    self.keys.entry(key.into_text()).or_insert(KeyEntry {
                        filename,
                        records: 0,
                    })
                }
            };
            entry.records += 1;
            self.pool.write_line(&entry.filename, &rendered)?;
            self.report.records_routed += 1;
            self.in_flight -= 1;
        }

        let bytes = self.pool.close_all()?;
        let stats = self.pool.stats();
        self.metrics.peak_open_sinks = stats.peak_open;
        self.metrics.sink_opens = stats.opens;
        self.metrics.evictions = stats.evictions;
        self.metrics.distinct_keys = self.keys.len();

        for (key, entry) in self.keys {
            *self
                .report
                .per_key
                .entry(String::from_utf8_lossy(&key).into_owned())
                .or_insert(0) += entry.records;
            self.report.files.push(FileSummary {
                bytes: bytes.get(&entry.filename).copied().unwrap_or(0),
                name: entry.filename,
                records: entry.records,
            });
        }
        self.report.files.sort_by(|a, b| a.name.cmp(&b.name));
        self.report.duration_ms = started.elapsed().as_millis() as u64;
        Ok((self.report, self.metrics))
    }

    fn malformed(&mut self, reason: MalformedReason) -> Result<()> {
        match self.config.on_malformed {
            OnMalformed::Skip => {
                self.report.malformed_count += 1;
                Ok(())
            }
            OnMalformed::Fail => Err(Error::MalformedInput(reason)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn setup(input: &str) -> (tempfile::TempDir, PartitionConfig) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("input.csv");
        fs::write(&path, input).unwrap();
        let config = PartitionConfig::new(path, dir.path().join("out"));
        (dir, config)
    }

    fn rec(line: &str) -> ParsedRecord {
        parse_record(line, Delimiter::COMMA, ParseMode::Legacy, 1).unwrap()
    }

    #[test]
    fn route_examples() {
        let config = PartitionConfig::new("in", "out");
        assert_eq!(
            route(&rec("7,New York,TRANSCOM,x"), &config).unwrap(),
            "7_TRANSCOM.txt"
        );
        assert_eq!(
            route(&rec("16,Chicago,INDOT,y"), &config).unwrap(),
            "16_INDOT.txt"
        );
        assert!(route(&rec("x"), &config).is_err());
    }

    #[test]
    fn empty_input() {
        let (_dir, config) = setup("");
        let (report, metrics) = partition_with_metrics(&config).unwrap();
        assert_eq!(report.records_read, 0);
        assert_eq!(report.files_created(), 0);
        assert_eq!(metrics.peak_buffered_records, 0);
        assert_eq!(fs::read_dir(&config.output_dir).unwrap().count(), 0);
    }

    #[test]
    fn short_line_skipped() {
        let (_dir, config) = setup("x\n");
        let report = partition(&config).unwrap();
        assert_eq!(report.malformed_count, 1);
        assert_eq!(report.records_routed, 0);
        assert_eq!(fs::read_dir(&config.output_dir).unwrap().count(), 0);
    }

    #[test]
    fn short_line_fails_under_fail_policy() {
        let (_dir, mut config) = setup("a,b,c\nx\n");
        config.on_malformed = OnMalformed::Fail;
        match partition(&config) {
            Err(Error::MalformedInput(reason)) => assert_eq!(reason.line_number, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn blank_lines_count_as_malformed() {
        let (_dir, config) = setup("a,b,c\n\r\n\na,x,c\n");
        let report = partition(&config).unwrap();
        assert_eq!(report.records_read, 4);
        assert_eq!(report.malformed_count, 2);
        assert_eq!(report.per_key["a_c"], 2);
    }

    #[test]
    fn crlf_and_missing_final_newline() {
        let (_dir, config) = setup("a,b,c\r\na,d,c");
        partition(&config).unwrap();
        let out = fs::read_to_string(config.output_dir.join("a_c.txt")).unwrap();
        assert_eq!(out, " a b c\n a d c\n");
    }

    #[test]
    fn missing_input_reports_reading_failure() {
        let dir = tempfile::tempdir().unwrap();
        let config = PartitionConfig::new(dir.path().join("nope.txt"), dir.path().join("out"));
        let err = partition(&config).unwrap_err();
        assert!(err.to_string().contains("Could not open file for reading."));
    }

    #[test]
    fn input_must_not_be_a_target() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("a_c.txt");
        fs::write(&input, "a,b,c\n").unwrap();
        let config = PartitionConfig::new(&input, dir.path());
        assert!(matches!(partition(&config), Err(Error::Config(_))));
        assert_eq!(fs::read_to_string(&input).unwrap(), "a,b,c\n");
    }

    #[test]
    fn empty_key_values_are_routed() {
        let (_dir, config) = setup(",b,,d\n");
        let report = partition(&config).unwrap();
        assert_eq!(report.per_key["_"], 1);
        assert!(config.output_dir.join("_.txt").exists());
    }

    #[test]
    fn non_utf8_bytes_pass_through() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("in");
        fs::write(&path, b"k\xff,x,v,\xfe\n").unwrap();
        let mut config = PartitionConfig::new(&path, dir.path().join("out"));
        config.render_mode = RenderMode::Passthrough;
        partition(&config).unwrap();
        let out = fs::read(config.output_dir.join("k%FF_v.txt")).unwrap();
        assert_eq!(out, b"k\xff,x,v,\xfe\n");
    }

    #[test]
    fn bad_suffix_rejected() {
        let (_dir, mut config) = setup("a,b,c\n");
        config.suffix = "/x".into();
        assert!(matches!(partition(&config), Err(Error::Config(_))));
    }
}
