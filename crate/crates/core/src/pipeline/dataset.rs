//! Text ingestion, integer conversion, positional split and block windowing.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Factor applied before rounding floats to integers.
pub const INT_SCALE: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Delimiter {
    #[default]
    Auto,
    Comma,
    Tab,
    Whitespace,
    Semicolon,
}

impl Delimiter {
    fn split<'a>(self, line: &'a str) -> Vec<&'a str> {
        let resolved = match self {
            Delimiter::Auto => {
                if line.contains(',') {
                    Delimiter::Comma
                } else if line.contains('\t') {
                    Delimiter::Tab
                } else if line.contains(';') {
                    Delimiter::Semicolon
                } else {
                    Delimiter::Whitespace
                }
            }
            d => d,
        };
        match resolved {
            Delimiter::Comma => line.split(',').map(str::trim).collect(),
            Delimiter::Tab => line.split('\t').map(str::trim).collect(),
            Delimiter::Semicolon => line.split(';').map(str::trim).collect(),
            _ => line.split_whitespace().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSpec {
    pub path: PathBuf,
    /// Zero-based column index.
    pub column: usize,
    pub train_fraction: f64,
    pub block_len: usize,
    pub delimiter: Delimiter,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self { path: PathBuf::new(), column: 0, train_fraction: 0.2, block_len: 80, delimiter: Delimiter::Auto }
    }
}

/// Everything needed to map normalized values back to source units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    /// Largest integer-converted training sample.
    pub divisor: f64,
    pub int_scale: f64,
}

impl Normalization {
    /// Normalized value to source units.
    pub fn to_source(&self, v: f64) -> f64 {
        v * self.divisor / self.int_scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train: Vec<Vec<f64>>,
    pub test: Vec<Vec<f64>>,
    pub norm: Normalization,
    /// Trailing samples that did not fill a block.
    pub dropped: usize,
    /// Rows skipped for failing to parse.
    pub skipped_rows: usize,
}

impl Dataset {
    pub fn test_samples(&self) -> Vec<f64> {
        self.test.concat()
    }
}

/// Parses one numeric column. Returns the values and the number of skipped
/// rows (blank lines are ignored without counting).
pub fn read_column(text: &str, column: usize, delimiter: Delimiter) -> Result<(Vec<f64>, usize)> {
    let mut out = Vec::new();
    let mut skipped = 0;
    let mut short = 0;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields = delimiter.split(line);
        match fields.get(column) {
            None => {
                short += 1;
                skipped += 1;
            }
            Some(f) => match f.parse::<f64>() {
                Ok(v) if v.is_finite() => out.push(v),
                _ => skipped += 1,
            },
        }
    }
    if out.is_empty() && short > 0 {
        return Err(Error::InvalidParameter(format!("column {column} not present")));
    }
    Ok((out, skipped))
}

/// Scales by 10^6 and rounds, windows the stream into blocks, assigns the
/// leading `train_fraction` of blocks to training and normalizes everything
/// by the largest training sample.
pub fn prepare(samples: &[f64], train_fraction: f64, h: usize) -> Result<Dataset> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParameter("train_fraction must lie in (0, 1)".into()));
    }
    if h == 0 {
        return Err(Error::InvalidParameter("block length must be positive".into()));
    }
    let ints: Vec<f64> = samples.iter().map(|v| (v * INT_SCALE).round()).collect();
    let all: Vec<&[f64]> = ints.chunks_exact(h).collect();
    let dropped = ints.len() % h;
    let n_train = (all.len() as f64 * train_fraction).floor() as usize;
    if n_train == 0 {
        return Err(Error::Empty("training split has no full block"));
    }
    let divisor = all[..n_train].iter().flat_map(|b| b.iter()).fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    if !(divisor > 0.0) {
        return Err(Error::InvalidParameter(format!("training maximum {divisor} is not positive")));
    }
    let norm = |b: &&[f64]| b.iter().map(|v| v / divisor).collect::<Vec<_>>();
    Ok(Dataset {
        train: all[..n_train].iter().map(norm).collect(),
        test: all[n_train..].iter().map(norm).collect(),
        norm: Normalization { divisor, int_scale: INT_SCALE },
        dropped,
        skipped_rows: 0,
    })
}

pub fn ingest(spec: &DatasetSpec) -> Result<Dataset> {
    ingest_path(&spec.path, spec)
}

fn ingest_path(path: &Path, spec: &DatasetSpec) -> Result<Dataset> {
    let text = fs::read_to_string(path)?;
    let (values, skipped) = read_column(&text, spec.column, spec.delimiter)?;
    if skipped > 0 {
        log::warn!("skipped {skipped} non-numeric rows in {}", path.display());
    }
    let mut ds = prepare(&values, spec.train_fraction, spec.block_len)?;
    ds.skipped_rows = skipped;
    Ok(ds)
}
