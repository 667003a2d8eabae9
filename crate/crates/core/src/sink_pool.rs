//! Bounded pool of append-mode output files.
//!
//! At most `capacity` files are open at once. Acquiring a file that is not
//! open while the pool is full flushes and closes the least recently used
//! one; a later acquire reopens it in append mode, so the final contents do
//! not depend on the capacity.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use crate::error::{Error, IoOp, Result};

pub const DEFAULT_CAPACITY: usize = 512;

/// Maximum number of simultaneously open sinks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capacity {
    Bounded(NonZeroUsize),
    Unbounded,
}

impl Capacity {
    pub fn bounded(n: usize) -> Option<Capacity> {
        NonZeroUsize::new(n).map(Capacity::Bounded)
    }

    fn limit(self) -> usize {
        match self {
            Capacity::Bounded(n) => n.get(),
            Capacity::Unbounded => usize::MAX,
        }
    }
}

impl Default for Capacity {
    fn default() -> Self {
        Capacity::bounded(DEFAULT_CAPACITY).unwrap()
    }
}

/// What to do with an output file that exists before the run touches it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum RunPolicy {
    /// Truncate on first touch so reruns are deterministic.
    #[default]
    Fresh,
    /// Append to whatever is already there.
    AppendExisting,
}

struct OpenSink {
    writer: BufWriter<File>,
    last_use: u64,
}

/// Counters exposed for tests and the run report.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PoolStats {
    pub opens: u64,
    pub evictions: u64,
    pub peak_open: usize,
}

pub struct SinkPool {
    output_dir: PathBuf,
    capacity: Capacity,
    policy: RunPolicy,
    open: HashMap<String, OpenSink>,
    // last-use tick -> filename, oldest first
    recency: BTreeMap<u64, String>,
    tick: u64,
    created: HashSet<String>,
    bytes_written: HashMap<String, u64>,
    stats: PoolStats,
}

impl SinkPool {
    pub fn new(output_dir: impl Into<PathBuf>, capacity: Capacity, policy: RunPolicy) -> SinkPool {
        SinkPool {
            output_dir: output_dir.into(),
            capacity,
            policy,
            open: HashMap::new(),
            recency: BTreeMap::new(),
            tick: 0,
            created: HashSet::new(),
            bytes_written: HashMap::new(),
            stats: PoolStats::default(),
        }
    }

    pub fn output_dir(&self) -> &Path {
        &self.output_dir
    }

    pub fn open_count(&self) -> usize {
        self.open.len()
    }

    pub fn is_open(&self, filename: &str) -> bool {
        self.open.contains_key(filename)
    }

    pub fn stats(&self) -> PoolStats {
        self.stats
    }

    pub fn bytes_written(&self, filename: &str) -> u64 {
        self.bytes_written.get(filename).copied().unwrap_or(0)
    }

    /// Return an append-mode writer for `filename`, opening it if needed.
    pub fn acquire(&mut self, filename: &str) -> Result<&mut BufWriter<File>> {
        self.tick += 1;
        let tick = self.tick;

        if let Some(sink) = self.open.get_mut(filename) {
            self.recency.remove(&sink.last_use);
            sink.last_use = tick;
            self.recency.insert(tick, filename.to_owned());
        } else {
            while self.open.len() >= self.capacity.limit() {
                self.evict_lru()?;
            }
            let path = self.output_dir.join(filename);
            let first_touch = !self.created.contains(filename);
            let mut options = OpenOptions::new();
            options.create(true);
            if first_touch && self.policy == RunPolicy::Fresh {
                options.write(true).truncate(true);
            } else {
                options.append(true);
            }
            let file = options
                .open(&path)
                .map_err(|e| Error::io(IoOp::Open, &path, e))?;
            self.stats.opens += 1;
            if first_touch {
                self.created.insert(filename.to_owned());
                self.bytes_written.insert(filename.to_owned(), 0);
            }
            self.open.insert(
                filename.to_owned(),
                OpenSink {
                    writer: BufWriter::new(file),
                    last_use: tick,
                },
            );
            self.recency.insert(tick, filename.to_owned());
            self.stats.peak_open = self.stats.peak_open.max(self.open.len());
        }

        Ok(&mut self.open.get_mut(filename).unwrap().writer)
    }

    /// Append `line` verbatim to `filename`.
    pub fn write_line(&mut self, filename: &str, line: &[u8]) -> Result<()> {
        debug_assert!(line.ends_with(b"\n"));
        let path = self.output_dir.join(filename);
        self.acquire(filename)?
            .write_all(line)
            .map_err(|e| Error::io(IoOp::Write, path, e))?;
        *self.bytes_written.get_mut(filename).unwrap() += line.len() as u64;
        Ok(())
    }

    fn evict_lru(&mut self) -> Result<()> {
        let Some((_, filename)) = self.recency.pop_first() else {
            return Ok(());
        };
        let mut sink = self.open.remove(&filename).unwrap();
        self.stats.evictions += 1;
        sink.writer
            .flush()
            .map_err(|e| Error::io(IoOp::Flush, self.output_dir.join(&filename), e))
    }

    /// Flush and close every sink, returning bytes written per created file.
    pub fn close_all(&mut self) -> Result<BTreeMap<String, u64>> {
        let mut first_err = None;
        for (filename, mut sink) in self.open.drain() {
            if let Err(e) = sink.writer.flush() {
                first_err.get_or_insert(Error::io(IoOp::Flush, self.output_dir.join(&filename), e));
            }
        }
        self.recency.clear();
        if let Some(e) = first_err {
            return Err(e);
        }
        Ok(self
            .bytes_written
            .iter()
            .map(|(k, v)| (k.clone(), *v))
            .collect())
    }
}

impl Drop for SinkPool {
    fn drop(&mut self) {
        for sink in self.open.values_mut() {
            let _ = sink.writer.flush();
        }
    }
}
