/*
Copyright 2026 The nc-admm Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

//! LIBSVM / SVMlight text format: `label idx:val idx:val ...` with 1-based,
//! strictly increasing indices. Blank lines and `#` comments are skipped.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, Features, Labels};
use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;

/// How raw labels become ±1 for two-class files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum BinaryLabelRule {
    /// Of the two distinct values, the smaller maps to -1.
    #[default]
    SmallerIsNegative,
    /// This raw value maps to -1, anything else to +1.
    Negative(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum LabelKind {
    /// Binary when at most two distinct labels appear, multiclass otherwise.
    #[default]
    Auto,
    Binary(BinaryLabelRule),
    /// Labels remapped to `[0, m)` in sorted order of their raw values.
    Multiclass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct LibsvmOptions {
    pub labels: LabelKind,
    /// Feature dimension; defaults to the largest index seen.
    pub dim: Option<usize>,
}

struct RawRow {
    label: f64,
    entries: Vec<(usize, f64)>,
}

fn parse_line(text: &str, line: usize) -> Result<Option<RawRow>> {
    let body = text.split('#').next().unwrap_or("").trim();
    if body.is_empty() {
        return Ok(None);
    }
    let err = |message: String| Error::Parse { line, message };
    let mut tokens = body.split_whitespace();
    let label_tok = tokens.next().expect("non-empty body");
    let label: f64 = label_tok.parse().map_err(|_| err(format!("bad label {label_tok:?}")))?;
    if !label.is_finite() {
        return Err(err(format!("non-finite label {label_tok:?}")));
    }
    let mut entries = Vec::new();
    let mut last = 0usize;
    for tok in tokens {
        let (idx, val) = tok.split_once(':').ok_or_else(|| err(format!("token {tok:?} is not idx:val")))?;
        let idx: usize = idx.parse().map_err(|_| err(format!("bad index in {tok:?}")))?;
        if idx == 0 {
            return Err(err("indices are 1-based".into()));
        }
        if idx <= last {
            return Err(err(format!("index {idx} not strictly increasing after {last}")));
        }
        let val: f64 = val.parse().map_err(|_| err(format!("bad value in {tok:?}")))?;
        if !val.is_finite() {
            return Err(err(format!("non-finite value in {tok:?}")));
        }
        last = idx;
        entries.push((idx - 1, val));
    }
    Ok(Some(RawRow { label, entries }))
}

/// Parses LIBSVM text from any reader. Accepts LF and CRLF line endings.
pub fn parse_libsvm<R: Read>(reader: R, name: &str, options: &LibsvmOptions) -> Result<Dataset> {
    let mut rows = Vec::new();
    for (k, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if let Some(row) = parse_line(&line, k + 1)? {
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let max_index = rows.iter().filter_map(|r| r.entries.last().map(|e| e.0 + 1)).max().unwrap_or(0);
    let dim = match options.dim {
        Some(d) if d < max_index => {
            return Err(Error::input(format!("dimension override {d} below largest index {max_index}")));
        }
        Some(d) => d,
        None => max_index,
    };

    let raw_labels: Vec<f64> = rows.iter().map(|r| r.label).collect();
    let labels = normalize_labels(&raw_labels, options.labels)?;

    let triplets: Vec<(usize, usize, f64)> = rows
        .iter()
        .enumerate()
        .flat_map(|(r, row)| row.entries.iter().map(move |&(c, v)| (r, c, v)))
        .collect();
    let features = Features::Sparse(CsrMatrix::from_triplets(rows.len(), dim, &triplets)?);
    Dataset::new(name, format!("libsvm:{name}"), features, labels)
}

pub fn read_libsvm(path: &Path, options: &LibsvmOptions) -> Result<Dataset> {
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("libsvm").to_string();
    parse_libsvm(File::open(path)?, &name, options)
}

fn distinct_sorted(values: &[f64]) -> Vec<f64> {
    let set: BTreeSet<u64> = values.iter().map(|v| ordered_bits(*v)).collect();
    set.into_iter().map(from_ordered_bits).collect()
}

// Total order on finite floats through their bit patterns.
fn ordered_bits(v: f64) -> u64 {
    let v = if v == 0.0 { 0.0 } else { v };
    let b = v.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

fn from_ordered_bits(b: u64) -> f64 {
    if b >> 63 == 1 {
        f64::from_bits(b & !(1 << 63))
    } else {
        f64::from_bits(!b)
    }
}

fn normalize_labels(raw: &[f64], kind: LabelKind) -> Result<Labels> {
    let distinct = distinct_sorted(raw);
    let kind = match kind {
        LabelKind::Auto if distinct.len() <= 2 => LabelKind::Binary(BinaryLabelRule::SmallerIsNegative),
        LabelKind::Auto => LabelKind::Multiclass,
        k => k,
    };
    match kind {
        LabelKind::Binary(rule) => {
            let negative = match rule {
                BinaryLabelRule::Negative(v) => v,
                BinaryLabelRule::SmallerIsNegative => match distinct.as_slice() {
                    [lo, _] => *lo,
                    // One class only: keep the sign convention of the value itself.
                    [single] if *single > 0.0 => f64::NAN,
                    [single] => *single,
                    _ => {
                        return Err(Error::input(format!("{} distinct labels for a binary task", distinct.len())));
                    }
                },
            };
            Ok(Labels::Binary(raw.iter().map(|v| if *v == negative { -1.0 } else { 1.0 }).collect()))
        }
        LabelKind::Multiclass => {
            let labels = raw
                .iter()
                .map(|v| distinct.iter().position(|u| u == v).expect("value is among distinct labels"))
                .collect();
            Ok(Labels::Multiclass { classes: distinct.len(), labels })
        }
        LabelKind::Auto => unreachable!(),
    }
}

/// Writes `dataset` in LIBSVM form. Binary labels are written `+1`/`-1`,
/// class indices as integers; only nonzero features are emitted.
pub fn write_libsvm<W: Write>(dataset: &Dataset, mut out: W) -> Result<()> {
    for i in 0..dataset.n() {
        match &dataset.labels {
            Labels::Binary(v) => write!(out, "{}", if v[i] > 0.0 { "+1" } else { "-1" })?,
            Labels::Multiclass { labels, .. } => write!(out, "{}", labels[i])?,
        }
        for (c, v) in dataset.features.row_entries(i) {
            write!(out, " {}:{}", c + 1, v)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
