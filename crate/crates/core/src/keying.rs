//! Composite keys and the filenames derived from them.

use crate::error::MalformedReason;
use crate::record_codec::ParsedRecord;

/// Which columns form the key and how their values are joined.
///
/// Duplicate column indices are allowed; the value is then joined twice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySpec {
    columns: Vec<usize>,
    joiner: Vec<u8>,
}

impl KeySpec {
    /// Returns `None` when `columns` is empty.
    pub fn new(columns: Vec<usize>, joiner: impl Into<Vec<u8>>) -> Option<KeySpec> {
        if columns.is_empty() {
            return None;
        }
        Some(KeySpec {
            columns,
            joiner: joiner.into(),
        })
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn joiner(&self) -> &[u8] {
        &self.joiner
    }
}

impl Default for KeySpec {
    fn default() -> Self {
        KeySpec {
            columns: vec![0, 2],
            joiner: b"_".to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompositeKey {
    text: Vec<u8>,
    components: Vec<Vec<u8>>,
}

impl CompositeKey {
    pub fn text(&self) -> &[u8] {
        &self.text
    }

    pub fn components(&self) -> &[Vec<u8>] {
        &self.components
    }

    pub fn into_text(self) -> Vec<u8> {
        self.text
    }
}

pub fn extract_key(record: &ParsedRecord, spec: &KeySpec) -> Result<CompositeKey, MalformedReason> {
    let mut components = Vec::with_capacity(spec.columns.len());
    for &index in &spec.columns {
        let value = record.field(index).ok_or_else(|| {
            MalformedReason::missing_key_column(record.line_number(), index, record.field_count())
        })?;
        components.push(value.to_vec());
    }
    let text = components.join(spec.joiner.as_slice());
    Ok(CompositeKey { text, components })
}

fn is_safe(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'-')
}

/// Map key bytes to a filesystem-safe filename stem.
///
/// Bytes outside `[A-Za-z0-9._-]` become `%XX` (uppercase hex), and `%` is
/// always encoded. `""`, `"."` and `".."` get the reserved spellings
/// `%00EMPTY`, `%2E` and `%2E%2E`. The key `"\0EMPTY"`, which would otherwise
/// also encode to `%00EMPTY`, is spelled `%00%45MPTY` so the mapping stays
/// injective.
pub fn sanitize_stem(key: &[u8]) -> String {
    match key {
        b"" => return "%00EMPTY".to_owned(),
        b"." => return "%2E".to_owned(),
        b".." => return "%2E%2E".to_owned(),
        b"\0EMPTY" => return "%00%45MPTY".to_owned(),
        _ => {}
    }
    let mut out = String::with_capacity(key.len());
    for &b in key {
        if is_safe(b) {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

pub fn target_filename(stem: &str, suffix: &str) -> String {
    let mut name = String::with_capacity(stem.len() + suffix.len());
    name.push_str(stem);
    name.push_str(suffix);
    name
}
