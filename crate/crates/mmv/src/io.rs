//! File formats: dense complex CSV for matrices and signals ("re+imi"
//! cells), compact JSON for signals, and JSON metadata for matrices.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! write/read cycle is bit-exact.

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::ensembles::{EnsembleTag, MeasurementMatrix};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::signal::{support_of, JointSignal, Support};

/// Render a complex number as `re+imi` / `re-imi`.
pub fn format_complex(z: C64) -> String {
    // negative zero would render as "+-0i"
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    if im >= 0.0 || im.is_nan() {
        format!("{}+{}i", z.re, im)
    } else {
        format!("{}-{}i", z.re, -im)
    }
}

/// Parse `re+imi`, `re-imi`, or a bare real number.
pub fn parse_complex(text: &str) -> Result<C64> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty complex literal".into()));
    }
    let Some(body) = s.strip_suffix('i') else {
        let re: f64 = s
            .parse()
            .map_err(|e| Error::Parse(format!("bad real literal '{s}': {e}")))?;
        return Ok(C64::new(re, 0.0));
    };
    // split at the sign that separates the two mantissas: a '+'/'-' that is
    // neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let c = bytes[i];
        if (c == b'+' || c == b'-') && bytes[i - 1] != b'e' && bytes[i - 1] != b'E' {
            split = Some(i);
            break;
        }
    }
    let Some(i) = split else {
        return Err(Error::Parse(format!("no separator in complex literal '{s}'")));
    };
    let re: f64 = body[..i]
        .parse()
        .map_err(|e| Error::Parse(format!("bad real part in '{s}': {e}")))?;
    let sign = if bytes[i] == b'-' { -1.0 } else { 1.0 };
    let im: f64 = body[i + 1..]
        .parse()
        .map_err(|e| Error::Parse(format!("bad imaginary part in '{s}': {e}")))?;
    Ok(C64::new(re, sign * im))
}

/// Dense CSV, one matrix row per line.
pub fn complex_matrix_to_csv(m: &Array2<C64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_complex(m[[i, j]])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn complex_matrix_from_csv(text: &str) -> Result<Array2<C64>> {
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<C64>> = line.split(',').map(parse_complex).collect();
        rows.push(row?);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty matrix".into()));
    }
    let n_cols = rows[0].len();
    if rows.iter().any(|r| r.len() != n_cols) {
        return Err(Error::Parse("ragged rows in matrix CSV".into()));
    }
    Ok(Array2::from_shape_fn((rows.len(), n_cols), |(i, j)| {
        rows[i][j]
    }))
}

/// Sidecar metadata written next to generated matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixMetadata {
    pub ensemble: String,
    pub n: usize,
    pub cols: usize,
    pub seed: Option<u64>,
}

pub fn write_matrix_csv(path: &Path, matrix: &MeasurementMatrix) -> Result<()> {
    std::fs::write(path, complex_matrix_to_csv(&matrix.entries().to_owned()))?;
    Ok(())
}

/// Load a matrix CSV as a `Custom` measurement matrix (unit columns required).
pub fn read_matrix_csv(path: &Path) -> Result<MeasurementMatrix> {
    let text = std::fs::read_to_string(path)?;
    let entries = complex_matrix_from_csv(&text)?;
    MeasurementMatrix::from_entries(entries, EnsembleTag::Custom, None)
}

/// Path of the metadata sidecar for a matrix file: `<stem>.meta.json`.
pub fn metadata_path(matrix_path: &Path) -> std::path::PathBuf {
    matrix_path.with_extension("meta.json")
}

/// Load a matrix CSV, restoring the ensemble tag from the metadata sidecar
/// when one is present (Gaussian/Bernoulli matrices are not unit-norm and
/// would be rejected by the `Custom` path).
pub fn read_matrix_csv_with_meta(path: &Path) -> Result<MeasurementMatrix> {
    let meta_path = metadata_path(path);
    let (tag, seed) = if meta_path.is_file() {
        let meta: MatrixMetadata =
            serde_json::from_str(&std::fs::read_to_string(&meta_path)?)?;
        (EnsembleTag::parse(&meta.ensemble)?, meta.seed)
    } else {
        (EnsembleTag::Custom, None)
    };
    let text = std::fs::read_to_string(path)?;
    let entries = complex_matrix_from_csv(&text)?;
    MeasurementMatrix::from_entries(entries, tag, seed)
}

/// Load a dense complex CSV without any column-norm requirement
/// (measurements, signals).
pub fn read_complex_csv(path: &Path) -> Result<Array2<C64>> {
    let text = std::fs::read_to_string(path)?;
    complex_matrix_from_csv(&text)
}

/// Compact JSON form of a signal: dimensions, support, and the values of the
/// supported rows (row-major, one `[re, im]` pair per channel).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalJson {
    pub n_rows: usize,
    pub n_cols: usize,
    pub support: Vec<usize>,
    pub values: Vec<Vec<(f64, f64)>>,
}

impl SignalJson {
    pub fn from_signal(x: &JointSignal) -> Self {
        let support = match x.declared_support() {
            Some(s) => s.clone(),
            None => support_of(x, 0.0),
        };
        let entries = x.entries();
        let values = support
            .iter()
            .map(|j| {
                (0..x.n_channels())
                    .map(|l| (entries[[j, l]].re, entries[[j, l]].im))
                    .collect()
            })
            .collect();
        SignalJson {
            n_rows: x.n_rows(),
            n_cols: x.n_channels(),
            support: support.iter().collect(),
            values,
        }
    }

    pub fn into_signal(self) -> Result<JointSignal> {
        if self.values.len() != self.support.len() {
            return Err(Error::Parse(format!(
                "{} support indices but {} value rows",
                self.support.len(),
                self.values.len()
            )));
        }
        let mut entries = Array2::<C64>::zeros((self.n_rows, self.n_cols));
        for (j, row) in self.support.iter().zip(self.values.iter()) {
            if row.len() != self.n_cols {
                return Err(Error::Parse(format!(
                    "value row for index {j} has {} channels, expected {}",
                    row.len(),
                    self.n_cols
                )));
            }
            if *j >= self.n_rows {
                return Err(Error::Parse(format!(
                    "support index {j} out of range for {} rows",
                    self.n_rows
                )));
            }
            for (l, &(re, im)) in row.iter().enumerate() {
                entries[[*j, l]] = C64::new(re, im);
            }
        }
        JointSignal::with_support(entries, Support::new(self.support)?)
    }
}

pub fn signal_to_json(x: &JointSignal) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SignalJson::from_signal(x))?)
}

pub fn signal_from_json(text: &str) -> Result<JointSignal> {
    let parsed: SignalJson = serde_json::from_str(text)?;
    parsed.into_signal()
}

/// Dense signal CSV: rows are signal indices, columns are channels.
pub fn signal_to_csv(x: &JointSignal) -> String {
    complex_matrix_to_csv(&x.entries().to_owned())
}

pub fn signal_from_csv(text: &str) -> Result<JointSignal> {
    JointSignal::new(complex_matrix_from_csv(text)?)
}
