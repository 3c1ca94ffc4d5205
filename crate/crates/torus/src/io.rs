//! Field files: flat little-endian `f64` data beside a JSON sidecar, and CSV
//! slices for plotting.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TorusError};
use crate::field::{MatrixField, ScalarField};
use crate::grid::PeriodicGrid;

const FORMAT: &str = "fnell-field";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Scalar,
    /// `dim²` complex entries per point, each as `(re, im)`.
    Matrix { dim: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format: String,
    pub version: u32,
    pub kind: FieldKind,
    pub grid: PeriodicGrid,
    /// Number of `f64` values in the binary file.
    pub values: usize,
    pub encoding: String,
}

fn paths(base: &Path) -> (PathBuf, PathBuf) {
    (base.with_extension("bin"), base.with_extension("json"))
}

fn write_raw(base: &Path, kind: FieldKind, grid: &PeriodicGrid, data: &[f64]) -> Result<()> {
    let (bin, json) = paths(base);
    let mut bytes = Vec::with_capacity(8 * data.len());
    for v in data {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(&bin, bytes)?;
    let sidecar = Sidecar {
        format: FORMAT.into(),
        version: 1,
        kind,
        grid: grid.clone(),
        values: data.len(),
        encoding: "f64-le".into(),
    };
    let text = serde_json::to_string_pretty(&sidecar).map_err(|e| TorusError::Format(e.to_string()))?;
    fs::write(json, text + "\n")?;
    Ok(())
}

fn read_raw(base: &Path) -> Result<(Sidecar, Vec<f64>)> {
    let (bin, json) = paths(base);
    let sidecar: Sidecar =
        serde_json::from_str(&fs::read_to_string(json)?).map_err(|e| TorusError::Format(e.to_string()))?;
    if sidecar.format != FORMAT || sidecar.encoding != "f64-le" {
        return Err(TorusError::Format("unrecognised sidecar format".into()));
    }
    let bytes = fs::read(bin)?;
    if bytes.len() != 8 * sidecar.values {
        return Err(TorusError::Format(format!("expected {} bytes, found {}", 8 * sidecar.values, bytes.len())));
    }
    let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    Ok((sidecar, data))
}

/// Writes `base.bin` and `base.json`.
pub fn write_scalar_field(base: &Path, f: &ScalarField) -> Result<()> {
    write_raw(base, FieldKind::Scalar, f.grid(), f.values())
}

pub fn write_matrix_field(base: &Path, f: &MatrixField) -> Result<()> {
    let data: Vec<f64> = f.raw().iter().flat_map(|z| [z.re, z.im]).collect();
    write_raw(base, FieldKind::Matrix { dim: f.dim() }, f.grid(), &data)
}

pub fn read_scalar_field(base: &Path) -> Result<ScalarField> {
    let (sidecar, data) = read_raw(base)?;
    if sidecar.kind != FieldKind::Scalar {
        return Err(TorusError::Format("expected a scalar field".into()));
    }
    ScalarField::new(sidecar.grid, data)
}

pub fn read_matrix_field(base: &Path) -> Result<MatrixField> {
    let (sidecar, data) = read_raw(base)?;
    let FieldKind::Matrix { .. } = sidecar.kind else {
        return Err(TorusError::Format("expected a matrix field".into()));
    };
    let entries = data.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
    MatrixField::from_raw(sidecar.grid, entries)
}

/// CSV of the first one or two sampled axes (other indices held at 0):
/// coordinate columns then `value`.
pub fn write_csv_slice(f: &ScalarField, out: impl Write) -> Result<()> {
    let grid = f.grid();
    let shown = grid.axes().min(2);
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..shown).map(|a| format!("axis{a}")).collect();
    header.push("value".into());
    w.write_record(&header).map_err(csv_error)?;
    let n = grid.points_per_axis();
    for idx in 0..n.pow(shown as u32) {
        let mut multi = vec![0; grid.axes()];
        let mut rest = idx;
        for slot in multi[..shown].iter_mut().rev() {
            *slot = rest % n;
            rest /= n;
        }
        let p = grid.flat_index(&multi);
        let x = grid.coordinates(p);
        let mut record: Vec<String> = (0..shown).map(|a| x[grid.axis_coordinate(a)].to_string()).collect();
        record.push(f.values()[p].to_string());
        w.write_record(&record).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> TorusError {
    TorusError::Format(e.to_string())
}
