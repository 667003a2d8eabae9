//! Command-line front end.
//!
//! Exit codes: 0 success, 1 malformed input under `--on-malformed fail` or an
//! output I/O failure, 2 usage or configuration error, 3 input not readable.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};

use crate::engine::{partition, OnMalformed, PartitionConfig};
use crate::error::{Error, IoOp};
use crate::keying::KeySpec;
use crate::record_codec::{Delimiter, ParseMode, RenderMode};
use crate::report::{render_status, write_report};
use crate::sink_pool::{Capacity, RunPolicy};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParseModeArg {
    Legacy,
    KeepAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RenderModeArg {
    Paper,
    Passthrough,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnMalformedArg {
    Skip,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RunPolicyArg {
    Fresh,
    AppendExisting,
}

/// Split a delimited flat file into one file per composite key.
#[derive(Debug, Parser)]
#[command(name = "keysplit", version)]
pub struct CliInvocation {
    /// Delimited input file
    #[arg(long)]
    pub input: PathBuf,

    /// Directory receiving one output file per key (created if missing)
    #[arg(long)]
    pub output_dir: PathBuf,

    /// Single-character field delimiter
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    pub delimiter: Delimiter,

    /// Comma-separated 0-based key column indices
    #[arg(long, default_value = "0,2", value_parser = parse_columns)]
    pub key_columns: KeyColumns,

    /// Text placed between key column values
    #[arg(long, default_value = "_")]
    pub key_joiner: String,

    /// Appended to every output filename
    #[arg(long, default_value = ".txt")]
    pub suffix: String,

    #[arg(long, value_enum, default_value = "legacy")]
    pub parse_mode: ParseModeArg,

    #[arg(long, value_enum, default_value = "paper")]
    pub render_mode: RenderModeArg,

    /// Maximum simultaneously open output files, or "unbounded"
    #[arg(long, default_value = "512", value_parser = parse_capacity)]
    pub max_open_files: Capacity,

    #[arg(long, value_enum, default_value = "skip")]
    pub on_malformed: OnMalformedArg,

    #[arg(long, value_enum, default_value = "fresh")]
    pub run_policy: RunPolicyArg,

    /// Also write a JSON run report to this path
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn parse_delimiter(s: &str) -> Result<Delimiter, String> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Delimiter::new(c)
            .ok_or_else(|| format!("delimiter {c:?} must be an ASCII character other than CR/LF")),
        _ => Err(format!("delimiter {s:?} must be exactly one character")),
    }
}

/// Parsed `--key-columns` list; wrapped so clap treats it as one value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyColumns(pub Vec<usize>);

fn parse_columns(s: &str) -> Result<KeyColumns, String> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid column index {part:?}"))
        })
        .collect::<Result<_, _>>()
        .map(KeyColumns)
}

fn parse_capacity(s: &str) -> Result<Capacity, String> {
    if s.eq_ignore_ascii_case("unbounded") {
        return Ok(Capacity::Unbounded);
    }
    s.parse::<usize>()
        .ok()
        .and_then(Capacity::bounded)
        .ok_or_else(|| format!("max-open-files {s:?} must be a positive integer or \"unbounded\""))
}

impl CliInvocation {
    pub fn into_config(self) -> (PartitionConfig, Option<PathBuf>) {
        let mut config = PartitionConfig::new(self.input, self.output_dir);
        config.delimiter = self.delimiter;
        // parse_columns never yields an empty list
        config.key_spec =
            KeySpec::new(self.key_columns.0, self.key_joiner).expect("non-empty columns");
        config.suffix = self.suffix;
        config.parse_mode = match self.parse_mode {
            ParseModeArg::Legacy => ParseMode::Legacy,
            ParseModeArg::KeepAll => ParseMode::KeepAll,
        };
        config.render_mode = match self.render_mode {
            RenderModeArg::Paper => RenderMode::Paper,
            RenderModeArg::Passthrough => RenderMode::Passthrough,
        };
        config.pool_capacity = self.max_open_files;
        config.on_malformed = match self.on_malformed {
            OnMalformedArg::Skip => OnMalformed::Skip,
            OnMalformedArg::Fail => OnMalformed::Fail,
        };
        config.run_policy = match self.run_policy {
            RunPolicyArg::Fresh => RunPolicy::Fresh,
            RunPolicyArg::AppendExisting => RunPolicy::AppendExisting,
        };
        (config, self.report)
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io {
            op: IoOp::OpenInput,
            ..
        } => EXIT_INPUT,
        Error::Config(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let invocation = match CliInvocation::try_parse_from(argv) {
        Ok(inv) => inv,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let (config, report_path) = invocation.into_config();

    let report = match partition(&config) {
        Ok(report) => report,
        Err(e) => {
            let _ = writeln!(stderr, "keysplit: {e}");
            return exit_code(&e);
        }
    };
    let _ = write!(stdout, "{}", render_status(&report));

    if let Some(path) = report_path {
        if let Err(e) = write_report(&report, &path) {
            let _ = writeln!(stderr, "keysplit: {e}");
            return EXIT_FAILURE;
        }
    }
    EXIT_OK
}
