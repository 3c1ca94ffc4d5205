//! `F(A) = f(λ(A))` for Hermitian `A` and its first two derivatives.
//!
//! In an eigenframe of `A` the first derivative is `diag(f_i)` and the second
//! derivative acts on a perturbation `H̃` as
//! `Σ f_ij H̃_ii H̃_jj + Σ_{p≠q} (f_p - f_q)/(λ_p - λ_q) |H̃_pq|²`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{argument, Result};
use crate::linalg::{CMatrix, EigenSystem, Hermitian};
use crate::operator::{Derivatives, SymmetricOperator};

/// Relative eigenvalue separation below which the divided difference is
/// replaced by its limit.
pub const DEGENERATE_GAP: f64 = 1e-8;

/// Second derivative of `F` in an eigenframe.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondDerivativeForm {
    /// `f_ij`, row-major.
    pub diag_block: Vec<f64>,
    /// `(f_p - f_q)/(λ_p - λ_q)` off the diagonal, zero on it.
    pub offdiag_weights: Vec<f64>,
}

impl SecondDerivativeForm {
    pub fn new(lambda: &[f64], d: &Derivatives) -> Self {
        let n = lambda.len();
        let mut w = vec![0.0; n * n];
        for p in 0..n {
            for q in 0..n {
                if p == q {
                    continue;
                }
                let gap = lambda[p] - lambda[q];
                w[p * n + q] = if gap.abs() < DEGENERATE_GAP * (1.0 + lambda[p].abs()) {
                    // lim_{λ_q → λ_p} (f_p - f_q)/(λ_p - λ_q) = f_pp - f_pq
                    0.5 * ((d.hess[p * n + p] - d.hess[p * n + q]) + (d.hess[q * n + q] - d.hess[q * n + p]))
                } else {
                    (d.grad[p] - d.grad[q]) / gap
                };
            }
        }
        SecondDerivativeForm { diag_block: d.hess.clone(), offdiag_weights: w }
    }

    /// Evaluate on a perturbation already rotated into the eigenframe.
    pub fn apply(&self, h: &CMatrix) -> f64 {
        let n = h.dim();
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                total += self.diag_block[i * n + j] * h[(i, i)].re * h[(j, j)].re;
                if i != j {
                    total += self.offdiag_weights[i * n + j] * h[(i, j)].norm_sqr();
                }
            }
        }
        total
    }
}

/// Everything needed to linearize `F` at one matrix.
#[derive(Debug, Clone)]
pub struct PointJet {
    pub eigen: EigenSystem,
    pub derivs: Derivatives,
}

impl PointJet {
    pub fn new(op: &SymmetricOperator, a: &Hermitian) -> Result<Self> {
        check_dim(op, a)?;
        let eigen = a.eigen();
        let derivs = op.derivatives(&eigen.values)?;
        Ok(PointJet { eigen, derivs })
    }

    pub fn value(&self) -> f64 {
        self.derivs.value
    }

    /// `F' = V diag(f_i) V*` in the original basis.
    pub fn first_derivative(&self) -> CMatrix {
        let v = &self.eigen.vectors;
        v.mul(&CMatrix::diagonal(&self.derivs.grad)).mul(&v.adjoint())
    }

    pub fn second_derivative_form(&self) -> SecondDerivativeForm {
        SecondDerivativeForm::new(&self.eigen.values, &self.derivs)
    }

    pub fn second_form(&self, h: &Hermitian) -> f64 {
        let v = &self.eigen.vectors;
        let rotated = v.adjoint().mul(h.matrix()).mul(v);
        self.second_derivative_form().apply(&rotated)
    }
}

fn check_dim(op: &SymmetricOperator, a: &Hermitian) -> Result<()> {
    if a.dim() != op.dimension() {
        return Err(argument(alloc::format!(
            "matrix dimension {} does not match operator dimension {}",
            a.dim(),
            op.dimension()
        )));
    }
    Ok(())
}

pub fn eigen_decompose(a: &Hermitian) -> EigenSystem {
    a.eigen()
}

pub fn f_value(op: &SymmetricOperator, a: &Hermitian) -> Result<f64> {
    check_dim(op, a)?;
    op.eval(&a.eigenvalues())
}

pub fn first_derivative(op: &SymmetricOperator, a: &Hermitian) -> Result<CMatrix> {
    Ok(PointJet::new(op, a)?.first_derivative())
}

pub fn second_form(op: &SymmetricOperator, a: &Hermitian, h: &Hermitian) -> Result<f64> {
    if h.dim() != a.dim() {
        return Err(argument("perturbation dimension mismatch"));
    }
    Ok(PointJet::new(op, a)?.second_form(h))
}

/// `⟨M, H⟩ = Σ M_ij H_ji`, real for Hermitian arguments.
pub fn pairing(m: &CMatrix, h: &CMatrix) -> f64 {
    let n = m.dim();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            total += m[(i, j)] * h[(j, i)];
        }
    }
    total.re
}

/// `A - V diag(0, b_2, …, b_n) V*` with `b_i = (gap/2)(1 + (i-2)/(n-1))`, so
/// `0 < b_2 < … < b_n < 2 b_2 = gap` and the top eigenvalue is kept.
pub fn spectrum_separator(a: &Hermitian, gap: f64) -> Result<Hermitian> {
    if !(gap > 0.0) {
        return Err(argument("gap must be positive"));
    }
    let n = a.dim();
    let e = a.eigen();
    let mut b = vec![0.0; n];
    for (i, bi) in b.iter_mut().enumerate().skip(1) {
        *bi = 0.5 * gap * (1.0 + (i as f64 - 1.0) / (n as f64 - 1.0));
    }
    let shift = e.vectors.mul(&CMatrix::diagonal(&b)).mul(&e.vectors.adjoint());
    Ok(Hermitian::from_trusted(a.matrix().sub(&shift)))
}
