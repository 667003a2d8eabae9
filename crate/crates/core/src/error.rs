use std::fmt;
use std::io;
use std::path::PathBuf;

/// Why a single input line could not be routed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MalformedReason {
    pub kind: MalformedKind,
    pub line_number: u64,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MalformedKind {
    EmptyLine,
    MissingKeyColumn { index: usize },
}

impl MalformedReason {
    pub fn empty_line(line_number: u64) -> Self {
        MalformedReason {
            kind: MalformedKind::EmptyLine,
            line_number,
            detail: "empty line".to_owned(),
        }
    }

    pub fn missing_key_column(line_number: u64, index: usize, field_count: usize) -> Self {
        MalformedReason {
            kind: MalformedKind::MissingKeyColumn { index },
            line_number,
            detail: format!("key column {index} missing, record has {field_count} field(s)"),
        }
    }
}

impl fmt::Display for MalformedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line_number, self.detail)
    }
}

/// The I/O step that failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IoOp {
    OpenInput,
    ReadInput,
    Open,
    Write,
    Flush,
    CreateOutputDir,
    WriteReport,
    ReadReport,
}

impl IoOp {
    fn message(self) -> &'static str {
        match self {
            IoOp::OpenInput => "Could not open file for reading.",
            IoOp::ReadInput => "Could not read input file.",
            IoOp::Open => "Could not open file for writing.",
            IoOp::Write => "Could not write to file.",
            IoOp::Flush => "Could not flush file.",
            IoOp::CreateOutputDir => "Could not create output directory.",
            IoOp::WriteReport => "Could not write report file.",
            IoOp::ReadReport => "Could not read report file.",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{} {}: {source}", .op.message(), .path.display())]
    Io {
        op: IoOp,
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed input at {0}")]
    MalformedInput(MalformedReason),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid report: {0}")]
    Report(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(op: IoOp, path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            op,
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
