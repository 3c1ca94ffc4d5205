//! Monitors for the a priori estimates on solved or synthetic fields.

use fnell_core::linalg::Metric;
use fnell_core::{CMatrix, Hermitian};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result, TorusError};
use crate::field::{check_grids, MatrixField, ScalarField};
use crate::geometry::hessian;
use crate::grid::GridMode;
use crate::spectral::Spectral;

/// Second-order versus gradient monitor with the parameters of the
/// maximum-principle test function `G = log λ̃_1 + φ(|∇u|²) + ψ(u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmwReport {
    /// `sup |∂∂̄u|_α`, the largest `α`-operator norm.
    pub sup_dd_u: f64,
    /// `sup |∇u|²_α`.
    pub sup_grad_sq: f64,
    /// `sup_dd_u / (1 + sup_grad_sq)`.
    pub ratio: f64,
    /// `K = sup |∇u|² + 1`.
    pub k: f64,
    /// `((4K)⁻¹, (2K)⁻¹)`, the range of `φ'` for `φ(t) = -½ log(1 - t/2K)`.
    pub phi_prime_bounds: [f64; 2],
    /// `A` in `ψ(t) = -2At + (Aτ/2)t²`.
    pub psi_a: f64,
    /// Largest `τ` keeping `A ≤ -ψ' ≤ 2A` on `[0, sup u - inf u]`; absent
    /// when `u` is constant.
    pub psi_tau: Option<f64>,
}

/// `|∇u|²_α = α^{i j̄} u_i u_{j̄}` with `u_i = ∂u/∂z_i = ½(∂_{x_i} - i ∂_{y_i})u`.
pub fn hmw_ratio(u: &ScalarField, alpha: &Metric, psi_a: f64) -> Result<HmwReport> {
    let grid = u.grid();
    let GridMode::Complex { n, resolve_imaginary } = grid.mode() else {
        return Err(TorusError::Mode("hmw_ratio needs a complex-mode grid".into()));
    };
    if alpha.dim() != n {
        return Err(argument("metric dimension does not match the grid"));
    }
    let spectral = Spectral::new(grid);
    let first = |axis: usize| spectral.derivative(u, &[axis]).map(ScalarField::into_values);
    let dx: Vec<Vec<f64>> = (0..n).map(|j| first(if resolve_imaginary { 2 * j } else { j })).collect::<Result<_>>()?;
    let dy: Vec<Vec<f64>> = if resolve_imaginary {
        (0..n).map(|j| first(2 * j + 1)).collect::<Result<_>>()?
    } else {
        vec![vec![0.0; grid.len()]; n]
    };
    let dd = hessian(u)?;
    let mut sup_dd_u = 0.0f64;
    let mut sup_grad_sq = 0.0f64;
    for p in 0..grid.len() {
        let w = Hermitian::from_trusted(alpha.whiten(&dd.at(p)));
        sup_dd_u = w.eigenvalues().iter().fold(sup_dd_u, |m, v| m.max(v.abs()));
        // ‖L⁻¹ ∂u‖² = (∂u)* α⁻¹ (∂u).
        let mut col = CMatrix::zeros(n);
        for j in 0..n {
            col[(j, 0)] = Complex64::new(0.5 * dx[j][p], -0.5 * dy[j][p]);
        }
        let z = alpha.lower_inverse().mul(&col);
        let norm: f64 = (0..n).map(|j| z[(j, 0)].norm_sqr()).sum();
        sup_grad_sq = sup_grad_sq.max(norm);
    }
    let k = sup_grad_sq + 1.0;
    let osc = u.max() - u.min();
    Ok(HmwReport {
        sup_dd_u,
        sup_grad_sq,
        ratio: sup_dd_u / k,
        k,
        phi_prime_bounds: [1.0 / (4.0 * k), 1.0 / (2.0 * k)],
        psi_a,
        psi_tau: (osc > 0.0).then(|| 1.0 / osc),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEstimate {
    /// Smallest `C` with `tr_α g ≤ C e^{A(u - inf u)}` on the grid.
    pub constant: f64,
    pub exponent: f64,
    pub threshold: f64,
    pub passed: bool,
}

pub fn trace_estimate_check(
    u: &ScalarField,
    g: &MatrixField,
    alpha: &Metric,
    a_const: f64,
    threshold: f64,
) -> Result<TraceEstimate> {
    check_grids(u.grid(), g.grid())?;
    let inf = u.min();
    let constant = u
        .values()
        .iter()
        .enumerate()
        .map(|(p, v)| alpha.trace_of(&g.at(p)) * (-a_const * (v - inf)).exp())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(TraceEstimate { constant, exponent: a_const, threshold, passed: constant <= threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PeriodicGrid;
    use std::f64::consts::PI;

    #[test]
    fn cosine_monitor() {
        let g = PeriodicGrid::complex(1, 32).unwrap();
        let a = 0.3;
        let u = ScalarField::from_fn(&g, |x| a * (2.0 * PI * x[0]).cos()).unwrap();
        let r = hmw_ratio(&u, &Metric::identity(1), 2.0).unwrap();
        assert!((r.sup_dd_u - a * PI * PI).abs() < 1e-10);
        assert!((r.sup_grad_sq - PI * PI * a * a).abs() < 1e-10);
        assert!((r.psi_tau.unwrap() - 1.0 / (2.0 * a)).abs() < 1e-12);
        let zero = hmw_ratio(&ScalarField::zeros(&g), &Metric::identity(1), 1.0).unwrap();
        assert_eq!((zero.ratio, zero.psi_tau), (0.0, None));
    }

    #[test]
    fn trace_of_constant_solution() {
        let g = PeriodicGrid::complex(2, 8).unwrap();
        let alpha = Metric::identity(2);
        let chi = MatrixField::constant(&g, &CMatrix::identity(2)).unwrap();
        let u = ScalarField::constant(&g, 3.0);
        let est = trace_estimate_check(&u, &chi, &alpha, 5.0, 2.5).unwrap();
        assert!((est.constant - 2.0).abs() < 1e-14 && est.passed);
        assert!(!trace_estimate_check(&u, &chi, &alpha, 5.0, 1.9).unwrap().passed);
    }
}
