//! The endomorphism field `A[u] = α⁻¹(χ + Hess u)`, quadrature and the
//! cohomological constants built from form ratios.
//!
//! Complex Hessians use `u_{i j̄} = ¼(u_{x_i x_j} + u_{y_i y_j} + i(u_{x_i y_j} - u_{y_i x_j}))`,
//! so `u = |z|²` has `u_{i j̄} = δ_ij`.

use fnell_core::linalg::Metric;
use fnell_core::symmetric::{binomial, sigma};
use fnell_core::{CMatrix, Hermitian};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{argument, Result, TorusError};
use crate::field::{check_grids, MatrixField, ScalarField};
use crate::grid::GridMode;
use crate::spectral::Spectral;

/// `Hess u = Σ_p (∂_{a_p} ∂_{b_p} u) E_p` over the distinct axis pairs that
/// enter the Hessian of the grid's mode.
#[derive(Debug, Clone)]
pub struct HessianBasis {
    pairs: Vec<(usize, usize)>,
    matrices: Vec<CMatrix>,
    symbols: Vec<Vec<Complex64>>,
}

impl HessianBasis {
    pub fn new(spectral: &Spectral) -> Self {
        let grid = spectral.grid();
        let dim = grid.matrix_dim();
        let mut entries: Vec<((usize, usize), CMatrix)> = Vec::new();
        let mut add = |a: usize, b: usize, i: usize, j: usize, w: Complex64| {
            let key = (a.min(b), a.max(b));
            let slot = match entries.iter().position(|(k, _)| *k == key) {
                Some(s) => s,
                None => {
                    entries.push((key, CMatrix::zeros(dim)));
                    entries.len() - 1
                }
            };
            entries[slot].1[(i, j)] += w;
        };
        let quarter = Complex64::new(0.25, 0.0);
        let quarter_i = Complex64::new(0.0, 0.25);
        match grid.mode() {
            GridMode::Real { m } => {
                for i in 0..m {
                    for j in 0..m {
                        add(i, j, i, j, Complex64::new(1.0, 0.0));
                    }
                }
            }
            GridMode::Complex { n, resolve_imaginary: false } => {
                for i in 0..n {
                    for j in 0..n {
                        add(i, j, i, j, quarter);
                    }
                }
            }
            GridMode::Complex { n, resolve_imaginary: true } => {
                let (x, y) = (|j: usize| 2 * j, |j: usize| 2 * j + 1);
                for i in 0..n {
                    for j in 0..n {
                        add(x(i), x(j), i, j, quarter);
                        add(y(i), y(j), i, j, quarter);
                        add(x(i), y(j), i, j, quarter_i);
                        add(y(i), x(j), i, j, -quarter_i);
                    }
                }
            }
        }
        entries.retain(|(_, m)| m.max_abs() > 0.0);
        let pairs: Vec<(usize, usize)> = entries.iter().map(|(k, _)| *k).collect();
        let symbols = pairs
            .iter()
            .map(|&(a, b)| spectral.symbol(&spectral.orders(&[a, b]).expect("axes in range")))
            .collect();
        HessianBasis { pairs, matrices: entries.into_iter().map(|(_, m)| m).collect(), symbols }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn symbols(&self) -> &[Vec<Complex64>] {
        &self.symbols
    }

    /// `∂_{a_p} ∂_{b_p} u` for every pair.
    pub fn derivatives(&self, spectral: &Spectral, values: &[f64]) -> Vec<Vec<f64>> {
        spectral.apply_symbols(values, &self.symbols)
    }

    /// The basis after `E ↦ L⁻¹ E L⁻*`.
    pub fn whitened(&self, metric: &Metric) -> Vec<CMatrix> {
        self.matrices.iter().map(|m| metric.whiten(m)).collect()
    }
}

/// `Σ_p d_p[point] E_p` for a precomputed basis.
pub(crate) fn assemble(basis: &[CMatrix], derivs: &[Vec<f64>], point: usize, base: &CMatrix) -> CMatrix {
    let mut out = base.clone();
    for (e, d) in basis.iter().zip(derivs) {
        let s = d[point];
        if s != 0.0 {
            out = out.add(&e.scale(s));
        }
    }
    out
}

/// Complex Hessian `(u_{i j̄})` in the ¼ convention.
pub fn complex_hessian(u: &ScalarField) -> Result<MatrixField> {
    if !u.grid().is_complex() {
        return Err(TorusError::Mode("complex_hessian needs a complex-mode grid".into()));
    }
    hessian(u)
}

/// The mode's Hessian: `u_{i j̄}` on complex grids, `u_{x_i x_j}` on real ones.
pub fn hessian(u: &ScalarField) -> Result<MatrixField> {
    let spectral = Spectral::new(u.grid());
    let basis = HessianBasis::new(&spectral);
    let derivs = basis.derivatives(&spectral, u.values());
    let zero = CMatrix::zeros(u.grid().matrix_dim());
    let matrices = (0..u.grid().len())
        .into_par_iter()
        .map(|p| Hermitian::from_trusted(assemble(basis.matrices(), &derivs, p, &zero)).into_matrix())
        .collect();
    MatrixField::from_matrices(u.grid(), matrices)
}

/// Metric from a constant positive definite field.
pub fn constant_metric(alpha: &MatrixField) -> Result<Metric> {
    let m = alpha
        .constant_value(1e-12)
        .ok_or_else(|| argument("α must be constant on the torus"))?;
    let h = Hermitian::new(m).map_err(|e| argument(format!("α is not Hermitian: {e}")))?;
    Metric::new(h).map_err(|_| argument("α is not positive definite"))
}

/// `A = L⁻¹(χ + Hess u)L⁻*` pointwise, with `α = LL*`; its eigenvalues are
/// those of `α⁻¹(χ + Hess u)`.
pub fn endomorphism_field(alpha: &Metric, chi: &MatrixField, u: &ScalarField) -> Result<MatrixField> {
    check_grids(chi.grid(), u.grid())?;
    if alpha.dim() != chi.dim() {
        return Err(argument("α and χ have different dimensions"));
    }
    let g = chi.add(&hessian(u)?)?;
    whiten_field(alpha, &g)
}

pub fn whiten_field(alpha: &Metric, g: &MatrixField) -> Result<MatrixField> {
    g.map(|m| Hermitian::from_trusted(alpha.whiten(m)).into_matrix())
}

/// Pointwise eigenvalues of `α⁻¹ g`, descending.
pub fn relative_eigenvalues(alpha: &Metric, g: &MatrixField) -> Vec<Vec<f64>> {
    (0..g.grid().len())
        .into_par_iter()
        .map(|p| Hermitian::from_trusted(alpha.whiten(&g.at(p))).eigenvalues())
        .collect()
}

/// `∫ f·weight` as the grid mean times the torus volume.
pub fn integral(f: &ScalarField, weight: Option<&ScalarField>) -> Result<f64> {
    let mean = match weight {
        None => f.mean(),
        Some(w) => {
            check_grids(f.grid(), w.grid())?;
            f.values().iter().zip(w.values()).map(|(a, b)| a * b).sum::<f64>() / f.values().len() as f64
        }
    };
    Ok(mean * f.grid().volume())
}

/// `χ^j ∧ α^{n-j} / αⁿ = σ_j(λ(α⁻¹χ)) / C(n,j)` pointwise.
pub fn form_ratio(chi: &MatrixField, alpha: &Metric, j: usize) -> Result<ScalarField> {
    let n = chi.dim();
    if j > n {
        return Err(argument(format!("form degree {j} exceeds dimension {n}")));
    }
    let norm = binomial(n, j);
    let values = relative_eigenvalues(alpha, chi)
        .into_iter()
        .map(|mu| Ok(sigma(j, &mu)? / norm))
        .collect::<Result<Vec<f64>>>()?;
    ScalarField::new(chi.grid().clone(), values)
}

/// `c = ∫ χ^l ∧ α^{n-l} / ∫ χ^k ∧ α^{n-k}`.
pub fn compute_c(chi: &MatrixField, alpha: &Metric, l: usize, k: usize) -> Result<f64> {
    let num = integral(&form_ratio(chi, alpha, l)?, None)?;
    let den = integral(&form_ratio(chi, alpha, k)?, None)?;
    if !(den > 0.0) {
        return Err(TorusError::DegenerateClass(format!("∫ χ^{k} ∧ α^(n-{k}) = {den:e} is not positive")));
    }
    Ok(num / den)
}

/// `χ = (tr_α η) α - (n-1) η`, for which `λ(α⁻¹χ)` is the `T`-preimage of
/// `λ(α⁻¹η)`.
pub fn nminus1_background(eta: &MatrixField, alpha: &Metric) -> Result<MatrixField> {
    let n = eta.dim();
    if n < 2 {
        return Err(argument("the (n-1)-form background needs n ≥ 2"));
    }
    let a = alpha.alpha().matrix().clone();
    eta.map(|e| a.scale(alpha.trace_of(e)).sub(&e.scale((n - 1) as f64)))
}
