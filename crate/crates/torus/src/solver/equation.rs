//! Pointwise residual and linearization of one member of a path.

use fnell_core::calculus::{pairing, PointJet};
use fnell_core::{CMatrix, Hermitian, SymmetricOperator};
use rayon::prelude::*;

use crate::error::{Result, TorusError};
use crate::geometry::{assemble, HessianBasis};
use crate::spectral::Spectral;

use super::problem::ProblemSpec;

/// Everything about the grid and background that does not change along a
/// solve.
pub(crate) struct Discretization {
    pub spectral: Spectral,
    pub basis: HessianBasis,
    /// `L⁻¹ E_p L⁻*`.
    pub whitened_basis: Vec<CMatrix>,
    /// `L⁻¹ χ L⁻*` per point.
    pub chi: Vec<CMatrix>,
}

impl Discretization {
    pub fn new(spec: &ProblemSpec) -> Self {
        let spectral = Spectral::new(spec.chi.grid());
        let basis = HessianBasis::new(&spectral);
        let whitened_basis = basis.whitened(&spec.alpha);
        let chi = (0..spec.chi.grid().len())
            .into_par_iter()
            .map(|p| spec.alpha.whiten(&spec.chi.at(p)))
            .collect();
        Discretization { spectral, basis, whitened_basis, chi }
    }

    pub fn len(&self) -> usize {
        self.chi.len()
    }

    pub fn pairs(&self) -> usize {
        self.whitened_basis.len()
    }

    pub fn derivatives(&self, values: &[f64]) -> Vec<Vec<f64>> {
        self.basis.derivatives(&self.spectral, values)
    }
}

/// `r = F_t(A[u]) - rhs - sign·c`.
pub(crate) struct PathEquation {
    pub op: SymmetricOperator,
    pub rhs: Vec<f64>,
    pub sign: f64,
}

pub(crate) struct Evaluation {
    pub residual: Vec<f64>,
    /// `K_{p,q} = ⟨F'(A), Ẽ_q⟩`, point-major; empty unless requested.
    pub coefficients: Vec<f64>,
    pub margin: f64,
    pub sup: f64,
}

impl PathEquation {
    pub fn evaluate(&self, disc: &Discretization, u: &[f64], c: f64, linearize: bool) -> Result<Evaluation> {
        let derivs = disc.derivatives(u);
        let pairs = disc.pairs();
        let per_point: Vec<Result<(f64, f64, Vec<f64>)>> = (0..disc.len())
            .into_par_iter()
            .map(|p| {
                let a = Hermitian::from_trusted(assemble(&disc.whitened_basis, &derivs, p, &disc.chi[p]));
                let jet = PointJet::new(&self.op, &a).map_err(|source| TorusError::Inadmissible { point: p, source })?;
                let margin = self.op.cone().margin(&jet.eigen.values);
                let coeffs = if linearize {
                    let fp = jet.first_derivative();
                    disc.whitened_basis.iter().map(|e| pairing(&fp, e)).collect()
                } else {
                    Vec::new()
                };
                Ok((jet.value() - self.rhs[p] - self.sign * c, margin, coeffs))
            })
            .collect();
        let mut residual = Vec::with_capacity(disc.len());
        let mut coefficients = Vec::with_capacity(if linearize { disc.len() * pairs } else { 0 });
        let mut margin = f64::INFINITY;
        for item in per_point {
            let (r, m, k) = item?;
            if !r.is_finite() {
                return Err(TorusError::Numeric("non-finite residual".into()));
            }
            residual.push(r);
            margin = margin.min(m);
            coefficients.extend(k);
        }
        let sup = residual.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        Ok(Evaluation { residual, coefficients, margin, sup })
    }

    /// `Σ_q K_q ∂_q v - sign·dc`.
    pub fn linearized(&self, disc: &Discretization, coefficients: &[f64], v: &[f64], dc: f64) -> Vec<f64> {
        let derivs = disc.derivatives(v);
        let pairs = disc.pairs();
        (0..disc.len())
            .map(|p| {
                let k = &coefficients[p * pairs..(p + 1) * pairs];
                k.iter().zip(&derivs).map(|(kq, d)| kq * d[p]).sum::<f64>() - self.sign * dc
            })
            .collect()
    }
}

/// Inverse of the mean-coefficient operator on non-constant modes, with the
/// constant mode sent to `dc`.
pub(crate) struct Preconditioner {
    inverse_symbol: Vec<f64>,
    sign: f64,
}

impl Preconditioner {
    pub fn new(disc: &Discretization, coefficients: &[f64], sign: f64) -> Self {
        let pairs = disc.pairs();
        let n = disc.len();
        let mean: Vec<f64> = (0..pairs)
            .map(|q| (0..n).map(|p| coefficients[p * pairs + q]).sum::<f64>() / n as f64)
            .collect();
        let symbols = disc.basis.symbols();
        let raw: Vec<f64> = (0..n).map(|m| mean.iter().zip(symbols).map(|(k, s)| k * s[m].re).sum()).collect();
        let scale = raw.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        let inverse_symbol = raw
            .iter()
            .enumerate()
            .map(|(m, &s)| if m == 0 || s.abs() <= 1e-14 * scale { 0.0 } else { 1.0 / s })
            .collect();
        Preconditioner { inverse_symbol, sign }
    }

    /// `y ↦ (v, dc)` with `v` mean-zero.
    pub fn apply(&self, disc: &Discretization, y: &[f64]) -> (Vec<f64>, f64) {
        let mut hat = disc.spectral.forward(y);
        let dc = -(hat[0].re / y.len() as f64) / self.sign;
        hat.iter_mut().zip(&self.inverse_symbol).for_each(|(z, s)| *z *= *s);
        (disc.spectral.inverse_real(hat), dc)
    }
}
