//! Trigonometric-interpolant derivatives via the discrete Fourier transform.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{argument, Result, TorusError};
use crate::field::{check_grids, ScalarField};
use crate::grid::PeriodicGrid;

/// FFT plans and wavenumbers for one grid. Cheap to share across threads.
#[derive(Clone)]
pub struct Spectral {
    grid: PeriodicGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// `2π j / L` per axis in FFT order; the Nyquist entry is positive.
    wavenumbers: Vec<Vec<f64>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish_non_exhaustive()
    }
}

impl Spectral {
    pub fn new(grid: &PeriodicGrid) -> Self {
        let n = grid.points_per_axis();
        let mut planner = FftPlanner::new();
        let wavenumbers = (0..grid.axes())
            .map(|a| {
                let scale = 2.0 * std::f64::consts::PI / grid.axis_period(a);
                (0..n).map(|j| scale * if j <= n / 2 { j as f64 } else { j as f64 - n as f64 }).collect()
            })
            .collect();
        Spectral {
            grid: grid.clone(),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            wavenumbers,
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut data, &self.forward);
        data
    }

    /// Inverse transform, normalised, keeping the real part.
    pub fn inverse_real(&self, mut data: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        data.into_iter().map(|z| z.re * scale).collect()
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.points_per_axis();
        let axes = self.grid.axes();
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // Last axis is contiguous: transform every row at once.
        plan.process_with_scratch(data, &mut scratch);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..axes.saturating_sub(1) {
            let stride = n.pow((axes - 1 - axis) as u32);
            let block = stride * n;
            for base in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    for (j, z) in line.iter_mut().enumerate() {
                        *z = data[base + offset + j * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (j, z) in line.iter().enumerate() {
                        data[base + offset + j * stride] = *z;
                    }
                }
            }
        }
    }

    /// Per-mode multiplier of `∏_a ∂_a^{orders[a]}`. Odd derivatives of the
    /// Nyquist mode are zero (its interpolant is a cosine).
    pub fn symbol(&self, orders: &[usize]) -> Vec<Complex64> {
        let n = self.grid.points_per_axis();
        let factors: Vec<Vec<Complex64>> = orders
            .iter()
            .enumerate()
            .map(|(a, &m)| {
                (0..n)
                    .map(|j| {
                        if j == n / 2 && m % 2 == 1 {
                            Complex64::new(0.0, 0.0)
                        } else {
                            Complex64::new(0.0, self.wavenumbers[a][j]).powu(m as u32)
                        }
                    })
                    .collect()
            })
            .collect();
        (0..self.grid.len())
            .map(|idx| {
                self.grid
                    .multi_index(idx)
                    .iter()
                    .zip(&factors)
                    .fold(Complex64::new(1.0, 0.0), |acc, (&j, f)| acc * f[j])
            })
            .collect()
    }

    /// Apply each symbol to one shared forward transform.
    pub fn apply_symbols(&self, values: &[f64], symbols: &[Vec<Complex64>]) -> Vec<Vec<f64>> {
        let hat = self.forward(values);
        symbols
            .iter()
            .map(|s| self.inverse_real(hat.iter().zip(s).map(|(a, b)| a * b).collect()))
            .collect()
    }

    /// Derivative with respect to the listed stored axes, e.g. `[0, 1]` for
    /// `∂²/∂x_0∂x_1`.
    pub fn derivative(&self, f: &ScalarField, axes: &[usize]) -> Result<ScalarField> {
        check_grids(&self.grid, f.grid())?;
        let symbol = self.symbol(&self.orders(axes)?);
        let out = self.apply_symbols(f.values(), &[symbol]).pop().expect("one symbol");
        ScalarField::new(self.grid.clone(), out)
    }

    pub(crate) fn orders(&self, axes: &[usize]) -> Result<Vec<usize>> {
        let mut orders = vec![0; self.grid.axes()];
        for &a in axes {
            if a >= orders.len() {
                return Err(argument(format!("axis {a} out of range for a grid with {} axes", orders.len())));
            }
            orders[a] += 1;
        }
        Ok(orders)
    }
}

/// One-shot derivative; builds the FFT plans each call.
pub fn spectral_derivative(f: &ScalarField, axes: &[usize]) -> Result<ScalarField> {
    if f.values().iter().any(|v| !v.is_finite()) {
        return Err(TorusError::Numeric("non-finite input".into()));
    }
    Spectral::new(f.grid()).derivative(f, axes)
}
