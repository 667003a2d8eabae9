//! Streaming composite-key partitioner for delimited flat files.
//!
//! Each input line is split into fields, a composite key is built from the
//! configured columns (by default columns 0 and 2 joined with `_`), and the
//! record is appended to `<key>.txt` in the output directory. Output files are
//! held in a bounded LRU pool of append-mode handles, so any number of
//! distinct keys can be processed with a fixed descriptor budget.

pub mod cli;
pub mod engine;
pub mod error;
pub mod keying;
pub mod record_codec;
pub mod report;
pub mod sink_pool;

pub use engine::{
    partition, partition_with_metrics, route, OnMalformed, PartitionConfig, RunMetrics,
};
pub use error::{Error, IoOp, MalformedKind, MalformedReason, Result};
pub use keying::{extract_key, sanitize_stem, target_filename, CompositeKey, KeySpec};
pub use record_codec::{
    parse_record, render_record, Delimiter, ParseMode, ParsedRecord, RenderMode,
};
pub use report::{render_status, FileSummary, RunReport};
pub use sink_pool::{Capacity, RunPolicy, SinkPool};
