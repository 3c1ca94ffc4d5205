//! Scalar and matrix-valued fields sampled on a [`PeriodicGrid`].

use fnell_core::CMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result, TorusError};
use crate::grid::PeriodicGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    grid: PeriodicGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(argument(format!("field has {} values, grid has {} points", values.len(), grid.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(TorusError::Numeric(format!("non-finite field value at point {i}")));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        ScalarField { grid: grid.clone(), values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: &PeriodicGrid, value: f64) -> Self {
        ScalarField { grid: grid.clone(), values: vec![value; grid.len()] }
    }

    /// Sample `f` at the real coordinates of every grid point.
    pub fn from_fn(grid: &PeriodicGrid, f: impl Fn(&[f64]) -> f64 + Sync) -> Result<Self> {
        let values = (0..grid.len()).into_par_iter().map(|i| f(&grid.coordinates(i))).collect();
        Self::new(grid.clone(), values)
    }

    pub(crate) fn from_parts(grid: PeriodicGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    fn zip(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_grids(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(ScalarField { grid: self.grid.clone(), values })
    }
}

/// One `dim × dim` Hermitian (or real symmetric) matrix per grid point,
/// stored contiguously in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    grid: PeriodicGrid,
    dim: usize,
    data: Vec<Complex64>,
}

impl MatrixField {
    pub fn constant(grid: &PeriodicGrid, m: &CMatrix) -> Result<Self> {
        check_dim(grid, m.dim())?;
        let data = m.as_slice().iter().copied().cycle().take(grid.len() * m.dim() * m.dim()).collect();
        Ok(MatrixField { grid: grid.clone(), dim: m.dim(), data })
    }

    pub fn from_matrices(grid: &PeriodicGrid, matrices: Vec<CMatrix>) -> Result<Self> {
        if matrices.len() != grid.len() {
            return Err(argument("one matrix per grid point required"));
        }
        let dim = grid.matrix_dim();
        let mut data = Vec::with_capacity(grid.len() * dim * dim);
        for m in &matrices {
            check_dim(grid, m.dim())?;
            data.extend_from_slice(m.as_slice());
        }
        Self::from_raw(grid.clone(), data)
    }

    pub fn from_fn(grid: &PeriodicGrid, f: impl Fn(&[f64]) -> CMatrix + Sync) -> Result<Self> {
        let matrices = (0..grid.len()).into_par_iter().map(|i| f(&grid.coordinates(i))).collect();
        Self::from_matrices(grid, matrices)
    }

    pub(crate) fn from_raw(grid: PeriodicGrid, data: Vec<Complex64>) -> Result<Self> {
        let dim = grid.matrix_dim();
        if data.len() != grid.len() * dim * dim {
            return Err(argument("matrix field data has the wrong length"));
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(TorusError::Numeric("non-finite matrix entry".into()));
        }
        Ok(MatrixField { grid, dim, data })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn raw(&self) -> &[Complex64] {
        &self.data
    }

    pub fn at(&self, point: usize) -> CMatrix {
        let d2 = self.dim * self.dim;
        CMatrix::from_rows(self.dim, self.data[point * d2..(point + 1) * d2].to_vec())
            .expect("slice has dim² entries")
    }

    pub fn matrices(&self) -> Vec<CMatrix> {
        (0..self.grid.len()).map(|p| self.at(p)).collect()
    }

    /// Largest entrywise distance from a Hermitian matrix over the grid.
    pub fn hermitian_deviation(&self) -> f64 {
        (0..self.grid.len()).map(|p| self.at(p).hermitian_deviation()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &MatrixField) -> Result<Self> {
        check_grids(&self.grid, &other.grid)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(MatrixField { grid: self.grid.clone(), dim: self.dim, data })
    }

    pub fn scale(&self, s: f64) -> Self {
        MatrixField { grid: self.grid.clone(), dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn map(&self, f: impl Fn(&CMatrix) -> CMatrix + Sync) -> Result<Self> {
        let matrices = (0..self.grid.len()).into_par_iter().map(|p| f(&self.at(p))).collect();
        Self::from_matrices(&self.grid, matrices)
    }

    /// The common value if every point carries the same matrix to `tol`.
    pub fn constant_value(&self, tol: f64) -> Option<CMatrix> {
        let first = self.at(0);
        (1..self.grid.len()).all(|p| self.at(p).sub(&first).max_abs() <= tol).then_some(first)
    }
}

pub(crate) fn check_grids(a: &PeriodicGrid, b: &PeriodicGrid) -> Result<()> {
    if a.same_shape(b) {
        Ok(())
    } else {
        Err(argument("fields live on different grids"))
    }
}

fn check_dim(grid: &PeriodicGrid, dim: usize) -> Result<()> {
    if dim != grid.matrix_dim() {
        return Err(argument(format!("matrix dimension {dim} does not match grid dimension {}", grid.matrix_dim())));
    }
    Ok(())
}
