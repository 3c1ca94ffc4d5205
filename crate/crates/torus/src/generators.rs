//! Named backgrounds and random band-limited fields.

use fnell_core::linalg::Metric;
use fnell_core::{CMatrix, Hermitian};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{argument, Result};
use crate::field::{MatrixField, ScalarField};
use crate::geometry::{hessian, relative_eigenvalues};
use crate::grid::PeriodicGrid;

/// `α = s·I`.
pub fn alpha_scaled(grid: &PeriodicGrid, s: f64) -> Result<MatrixField> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(argument("alpha_scaled needs s > 0"));
    }
    MatrixField::constant(grid, &CMatrix::identity(grid.matrix_dim()).scale(s))
}

/// `χ = s·α`.
pub fn chi_scaled(grid: &PeriodicGrid, alpha: &Metric, s: f64) -> Result<MatrixField> {
    if !s.is_finite() {
        return Err(argument("chi_scaled needs a finite s"));
    }
    MatrixField::constant(grid, &alpha.alpha().matrix().scale(s))
}

/// Random trigonometric polynomial with wavenumbers `|k_a| ≤ max_mode` on each
/// sampled axis, coefficients damped like `1/(1 + |k|²)`, rescaled to the
/// given sup norm.
pub fn smooth_field(grid: &PeriodicGrid, max_mode: usize, amplitude: f64, rng: &mut impl Rng) -> Result<ScalarField> {
    if max_mode == 0 || 2 * max_mode >= grid.points_per_axis() {
        return Err(argument("max_mode must be in 1..points_per_axis/2"));
    }
    let axes = grid.axes();
    let m = max_mode as i64;
    let side = (2 * m + 1) as usize;
    let mut modes = Vec::new();
    for code in 0..side.pow(axes as u32) {
        let mut c = code;
        let k: Vec<i64> = (0..axes)
            .map(|_| {
                let v = (c % side) as i64 - m;
                c /= side;
                v
            })
            .collect();
        // One representative of each ±k pair, skipping k = 0.
        if k.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0) {
            let weight = 1.0 / (1.0 + k.iter().map(|v| (v * v) as f64).sum::<f64>());
            let a = weight * rng.gen_range(-1.0..1.0);
            let b = weight * rng.gen_range(-1.0..1.0);
            modes.push((k, a, b));
        }
    }
    let tau = 2.0 * std::f64::consts::PI;
    let raw: Vec<f64> = (0..grid.len())
        .map(|p| {
            let x = grid.coordinates(p);
            modes
                .iter()
                .map(|(k, a, b)| {
                    let phase: f64 = (0..axes).map(|ax| tau * k[ax] as f64 * x[grid.axis_coordinate(ax)] / grid.axis_period(ax)).sum();
                    a * phase.cos() + b * phase.sin()
                })
                .sum()
        })
        .collect();
    let sup = raw.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let scale = if sup > 0.0 { amplitude / sup } else { 0.0 };
    ScalarField::new(grid.clone(), raw.into_iter().map(|v| v * scale).collect())
}

/// Potential `ψ` whose Hessian has grid-sup `α`-operator norm `amplitude`.
pub fn perturbation_potential(grid: &PeriodicGrid, alpha: &Metric, amplitude: f64, seed: u64) -> Result<ScalarField> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(argument("perturbation amplitude must be non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let psi = smooth_field(grid, 2.min(grid.points_per_axis() / 2 - 1), 1.0, &mut rng)?;
    let norm = relative_eigenvalues(alpha, &hessian(&psi)?)
        .iter()
        .flat_map(|mu| mu.iter().map(|v| v.abs()))
        .fold(0.0f64, f64::max);
    Ok(psi.scale(if norm > 0.0 { amplitude / norm } else { 0.0 }))
}

/// `χ = s·α + Hess ψ` with `ψ` from [`perturbation_potential`].
pub fn chi_perturbed(grid: &PeriodicGrid, alpha: &Metric, s: f64, amplitude: f64, seed: u64) -> Result<MatrixField> {
    let psi = perturbation_potential(grid, alpha, amplitude, seed)?;
    chi_scaled(grid, alpha, s)?.add(&hessian(&psi)?)
}

/// Constant metric `s·I`.
pub fn metric_scaled(n: usize, s: f64) -> Result<Metric> {
    let h = Hermitian::new(CMatrix::identity(n).scale(s))?;
    Metric::new(h).map_err(|_| argument("alpha_scaled needs s > 0"))
}
