//! Uniform periodic grids on flat complex and real tori.

use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridMode {
    /// `ℂⁿ/Λ`. With `resolve_imaginary = false` only the `x_j = Re z_j`
    /// directions are sampled and fields are taken constant in `y_j`.
    Complex { n: usize, resolve_imaginary: bool },
    /// `ℝᵐ/Λ`.
    Real { m: usize },
}

/// `points_per_axis` samples along every stored axis. `periods` lists one
/// period per real coordinate: `(x_1, y_1, …, x_n, y_n)` in complex mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicGrid {
    mode: GridMode,
    points_per_axis: usize,
    periods: Vec<f64>,
}

impl PeriodicGrid {
    pub fn new(mode: GridMode, points_per_axis: usize, periods: Vec<f64>) -> Result<Self> {
        let real_dim = match mode {
            GridMode::Complex { n, .. } if (1..=3).contains(&n) => 2 * n,
            GridMode::Real { m } if (1..=3).contains(&m) => m,
            _ => return Err(argument("complex dimension n and real dimension m must be in 1..=3")),
        };
        if points_per_axis < 4 || !points_per_axis.is_multiple_of(2) {
            return Err(argument(format!("points_per_axis must be even and at least 4, got {points_per_axis}")));
        }
        if periods.len() != real_dim {
            return Err(argument(format!("expected {real_dim} periods, got {}", periods.len())));
        }
        if periods.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(argument("periods must be positive and finite"));
        }
        Ok(PeriodicGrid { mode, points_per_axis, periods })
    }

    /// Unit periods, `y`-invariant fields.
    pub fn complex(n: usize, points_per_axis: usize) -> Result<Self> {
        Self::new(GridMode::Complex { n, resolve_imaginary: false }, points_per_axis, vec![1.0; 2 * n])
    }

    /// Unit periods, every real direction sampled.
    pub fn complex_full(n: usize, points_per_axis: usize) -> Result<Self> {
        Self::new(GridMode::Complex { n, resolve_imaginary: true }, points_per_axis, vec![1.0; 2 * n])
    }

    pub fn real(m: usize, points_per_axis: usize) -> Result<Self> {
        Self::new(GridMode::Real { m }, points_per_axis, vec![1.0; m])
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.mode, GridMode::Complex { .. })
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    /// `2n` or `m`.
    pub fn real_dimension(&self) -> usize {
        self.periods.len()
    }

    /// Size of the matrices `A[u]`: `n` or `m`.
    pub fn matrix_dim(&self) -> usize {
        match self.mode {
            GridMode::Complex { n, .. } => n,
            GridMode::Real { m } => m,
        }
    }

    /// Number of sampled axes.
    pub fn axes(&self) -> usize {
        match self.mode {
            GridMode::Complex { n, resolve_imaginary: false } => n,
            _ => self.periods.len(),
        }
    }

    /// Real coordinate index (into `periods`) of a stored axis.
    pub fn axis_coordinate(&self, axis: usize) -> usize {
        match self.mode {
            GridMode::Complex { resolve_imaginary: false, .. } => 2 * axis,
            _ => axis,
        }
    }

    pub fn axis_period(&self, axis: usize) -> f64 {
        self.periods[self.axis_coordinate(axis)]
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.axes() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn volume(&self) -> f64 {
        self.periods.iter().product()
    }

    /// Multi-index of a flat index; the last axis varies fastest.
    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let n = self.points_per_axis;
        let mut out = vec![0; self.axes()];
        for slot in out.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &i| acc * self.points_per_axis + i)
    }

    /// All real coordinates of a grid point (unsampled `y_j` are 0).
    pub fn coordinates(&self, idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.real_dimension()];
        for (axis, i) in self.multi_index(idx).into_iter().enumerate() {
            let c = self.axis_coordinate(axis);
            x[c] = self.periods[c] * i as f64 / self.points_per_axis as f64;
        }
        x
    }

    pub fn same_shape(&self, other: &PeriodicGrid) -> bool {
        self == other
    }
}
