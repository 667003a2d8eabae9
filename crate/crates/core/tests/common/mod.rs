//! Shared helpers for the integration tests.
//!
//! The oracles here deliberately avoid the crate's own parsing and keying
//! code: they work on `&str` with `str::split`, so an agreement between the
//! engine and an oracle is evidence, not a tautology.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;

pub const FIXTURE_KEYS: [(&str, usize); 7] = [
    ("1_IDOT.txt", 3),
    ("1_MT.txt", 9),
    ("7_TRANSCOM.txt", 5),
    ("16_INDOT.txt", 11),
    ("16_MT.txt", 8),
    ("17_MDSHA.txt", 9),
    ("17_MT.txt", 8),
];

pub fn fixture_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/text_mining.txt")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden")
}

pub fn fixture_lines() -> Vec<String> {
    fs::read_to_string(fixture_path())
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

/// Every regular file in `dir`, by name.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut tree = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        if entry.file_type().unwrap().is_file() {
            tree.insert(
                entry.file_name().into_string().unwrap(),
                fs::read(entry.path()).unwrap(),
            );
        }
    }
    tree
}

/// Perl-style `split /,/`: split on every comma, then drop trailing empties.
pub fn perl_split(line: &str) -> Vec<&str> {
    let mut fields: Vec<&str> = line.split(',').collect();
    while fields.last() == Some(&"") {
        fields.pop();
    }
    fields
}

/// `" @fields\n"` as the reference print statement interpolates it.
pub fn perl_render(line: &str) -> String {
    format!(" {}\n", perl_split(line).join(" "))
}

/// Count lines per (column 0, column 2) pair.
pub fn count_by_key(lines: &[String]) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        *counts
            .entry(format!("{}_{}.txt", cols[0], cols[2]))
            .or_insert(0) += 1;
    }
    counts
}

/// Literal transcription of the reference tool's four-branch routing.
///
/// The remembered keys start out as empty strings, which is how Perl
/// stringifies the initial `undef`.
pub struct CascadeRouter {
    store_first_key: String,
    store_second_key: String,
}

impl CascadeRouter {
    pub fn new() -> Self {
        CascadeRouter {
            store_first_key: String::new(),
            store_second_key: String::new(),
        }
    }

    // The branches are identical on purpose; that is what is being checked.
    #[allow(clippy::if_same_then_else)]
    pub fn route(&mut self, line: &str) -> String {
        let mut cur_line: std::collections::VecDeque<&str> = perl_split(line).into_iter().collect();
        let first_key = cur_line.pop_front().unwrap_or("").to_owned();
        let _city_name = cur_line.pop_front();
        let second_key = cur_line.pop_front().unwrap_or("").to_owned();

        let output1_file;
        if self.store_first_key == first_key && self.store_second_key == second_key {
            output1_file = format!("{}_{}.txt", first_key, second_key);
        } else if self.store_first_key == first_key && self.store_second_key != second_key {
            output1_file = format!("{}_{}.txt", first_key, second_key);
        } else if self.store_first_key != first_key && self.store_second_key == second_key {
            output1_file = format!("{}_{}.txt", first_key, second_key);
        } else {
            output1_file = format!("{}_{}.txt", first_key, second_key);
        }
        self.store_first_key = first_key;
        self.store_second_key = second_key;
        output1_file
    }
}

/// Lines `k1,<filler>,k2,<payload...>` with keys drawn from small alphabets.
pub fn random_corpus(rng: &mut impl Rng, max_records: usize) -> Vec<String> {
    let first_alphabet = rng.gen_range(1..=20);
    let second_alphabet = rng.gen_range(1..=20);
    let records = rng.gen_range(0..=max_records);
    // Runs of repeated keys exercise the "same key as previous line" branches.
    let mut k1 = 0;
    let mut k2 = 0;
    (0..records)
        .map(|i| {
            if rng.gen_bool(0.6) {
                k1 = rng.gen_range(0..first_alphabet);
            }
            if rng.gen_bool(0.6) {
                k2 = rng.gen_range(0..second_alphabet);
            }
            format!("a{k1},city {i},b{k2},{},x{}", rng.gen_range(0..1000), i % 7)
        })
        .collect()
}

/// Lines over `distinct` keys in random order, with varied field counts.
pub fn wide_corpus(rng: &mut impl Rng, distinct: usize, records: usize) -> Vec<String> {
    (0..records)
        .map(|i| {
            let key = rng.gen_range(0..distinct);
            let tail = ",".repeat(rng.gen_range(0..3));
            format!(
                "{key},c{i},K{},{}{tail}",
                key % 13,
                rng.gen_range(0..1_000_000)
            )
        })
        .collect()
}

pub fn write_lines(path: &Path, lines: &[String]) {
    let mut text = lines.join("\n");
    if !lines.is_empty() {
        text.push('\n');
    }
    fs::write(path, text).unwrap();
}

/// Run one acceptance criterion and print a single PASS/FAIL line for it.
pub fn criterion(id: &str, title: &str, check: impl FnOnce() -> Result<String, String>) {
    match check() {
        Ok(detail) => println!("[PASS] {id} {title}: {detail}"),
        Err(detail) => {
            println!("[FAIL] {id} {title}: {detail}");
            panic!("{id} failed: {detail}");
        }
    }
}
