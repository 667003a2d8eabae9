//! Line splitting and rendering.
//!
//! A [`ParsedRecord`] owns the raw line bytes and stores each field as a
//! byte range into them, so parsing allocates one span vector per line and
//! never copies field contents.

use std::ops::Range;

use crate::error::MalformedReason;

/// Field splitting semantics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ParseMode {
    /// Split on every delimiter, then drop the maximal trailing run of empty
    /// fields (Perl `split` behaviour).
    #[default]
    Legacy,
    /// Split on every delimiter and keep every field.
    KeepAll,
}

/// Output line format.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum RenderMode {
    /// One space, the fields joined by single spaces, then a newline.
    #[default]
    Paper,
    /// The raw input line followed by a newline.
    Passthrough,
}

/// A field delimiter: one ASCII byte other than CR or LF.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delimiter(u8);

impl Delimiter {
    pub const COMMA: Delimiter = Delimiter(b',');

    pub fn new(c: char) -> Option<Delimiter> {
        if c.is_ascii() && c != '\n' && c != '\r' {
            Some(Delimiter(c as u8))
        } else {
            None
        }
    }

    pub fn byte(self) -> u8 {
        self.0
    }
}

impl Default for Delimiter {
    fn default() -> Self {
        Delimiter::COMMA
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedRecord {
    raw: Vec<u8>,
    spans: Vec<Range<usize>>,
    line_number: u64,
}

impl ParsedRecord {
    pub fn raw(&self) -> &[u8] {
        &self.raw
    }

    pub fn line_number(&self) -> u64 {
        self.line_number
    }

    pub fn field_count(&self) -> usize {
        self.spans.len()
    }

    pub fn field(&self, index: usize) -> Option<&[u8]> {
        self.spans.get(index).map(|r| &self.raw[r.clone()])
    }

    pub fn fields(&self) -> impl ExactSizeIterator<Item = &[u8]> + '_ {
        self.spans.iter().map(move |r| &self.raw[r.clone()])
    }

    /// Owned copies of the fields, mostly useful in tests.
    pub fn to_field_vec(&self) -> Vec<Vec<u8>> {
        self.fields().map(<[u8]>::to_vec).collect()
    }
}

/// Split an already terminator-stripped line into fields.
///
/// The only failure is an empty line. In legacy mode a line made solely of
/// delimiters yields a single empty field.
pub fn parse_record(
    line: impl Into<Vec<u8>>,
    delimiter: Delimiter,
    mode: ParseMode,
    line_number: u64,
) -> Result<ParsedRecord, MalformedReason> {
    let raw = line.into();
    debug_assert!(!raw.contains(&b'\n'), "line terminator not stripped");
    if raw.is_empty() {
        return Err(MalformedReason::empty_line(line_number));
    }

    let d = delimiter.byte();
    let mut spans = Vec::with_capacity(raw.iter().filter(|&&b| b == d).count() + 1);
    let mut start = 0;
    for (i, &b) in raw.iter().enumerate() {
        if b == d {
            spans.push(start..i);
            start = i + 1;
        }
    }
    spans.push(start..raw.len());

    if mode == ParseMode::Legacy {
        while spans.len() > 1 && spans.last().is_some_and(|r| r.is_empty()) {
            spans.pop();
        }
    }

    Ok(ParsedRecord {
        raw,
        spans,
        line_number,
    })
}

/// Append the rendered form of `record`, including one trailing `\n`, to `out`.
pub fn render_into(record: &ParsedRecord, mode: RenderMode, out: &mut Vec<u8>) {
    match mode {
        RenderMode::Paper => {
            for field in record.fields() {
                out.push(b' ');
                out.extend_from_slice(field);
            }
        }
        RenderMode::Passthrough => out.extend_from_slice(&record.raw),
    }
    out.push(b'\n');
}

pub fn render_record(record: &ParsedRecord, mode: RenderMode) -> Vec<u8> {
    let mut out = Vec::with_capacity(record.raw.len() + 2);
    render_into(record, mode, &mut out);
    out
}

/// Strip one trailing `\n` or `\r\n` from `line`.
pub fn strip_terminator(line: &[u8]) -> &[u8] {
    let line = line.strip_suffix(b"\n").unwrap_or(line);
    line.strip_suffix(b"\r").unwrap_or(line)
}
