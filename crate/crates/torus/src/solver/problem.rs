use fnell_core::linalg::Metric;
use fnell_core::{OperatorKind, SymmetricOperator};
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::field::{check_grids, MatrixField, ScalarField};

/// Which one-parameter family joins a trivially solvable equation to the
/// target `F(A[u]) = h + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    /// No path: solve `F(A[u]) = h + c` directly from `u = 0`.
    Fixed,
    /// `F(A[u_t]) - offset = tH + (1-t)H₀ + c_t` with `H = h` and
    /// `H₀ = F(A[0]) - offset`; `offset = log C(n,k)` for `log σ_k`.
    Hessian,
    /// The blended quotient operator at `t` with right-hand side `-c_t`;
    /// needs a `hessian_quotient` operator.
    Quotient,
    /// `F(A[u_t]) = c_t + (1-t)h₀` with `h₀ = F(α⁻¹χ)`; `h` is unused.
    Riemannian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    MeanZero,
    SupZero,
}

/// Subtract the mean or the maximum.
pub fn normalize(u: &ScalarField, mode: Normalization) -> ScalarField {
    let shift = match mode {
        Normalization::MeanZero => u.mean(),
        Normalization::SupZero => u.max(),
    };
    u.map(|v| v - shift)
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub op: SymmetricOperator,
    pub alpha: Metric,
    pub chi: MatrixField,
    pub h: ScalarField,
    pub path: PathKind,
    pub normalization: Normalization,
    /// Sup-norm residual at which Newton stops.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl ProblemSpec {
    pub fn new(op: SymmetricOperator, alpha: Metric, chi: MatrixField, h: ScalarField, path: PathKind) -> Result<Self> {
        check_grids(chi.grid(), h.grid())?;
        let dim = chi.grid().matrix_dim();
        if op.dimension() != dim || alpha.dim() != dim {
            return Err(argument(format!(
                "operator dimension {}, metric dimension {} and grid dimension {dim} must agree",
                op.dimension(),
                alpha.dim()
            )));
        }
        if path == PathKind::Quotient && !matches!(op.kind(), OperatorKind::HessianQuotientNeg { .. }) {
            return Err(argument("the quotient path needs a hessian_quotient operator"));
        }
        if matches!(op.kind(), OperatorKind::BlendedQuotient { .. }) {
            return Err(argument("the blended operator is internal to the quotient path"));
        }
        Ok(ProblemSpec {
            op,
            alpha,
            chi,
            h,
            path,
            normalization: Normalization::MeanZero,
            tolerance: 1e-10,
            max_iterations: 50,
        })
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    /// `(l, k)` of the quotient operator.
    pub fn quotient_degrees(&self) -> Option<(usize, usize)> {
        match self.op.kind() {
            OperatorKind::HessianQuotientNeg { l, k } => Some((*l, *k)),
            _ => None,
        }
    }
}

/// One iterate `(u, c)` at path parameter `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveState {
    pub u: ScalarField,
    pub c: f64,
    pub t: f64,
    pub residual_norm: f64,
    /// `min` over the grid of the cone margin of `λ(A[u])`.
    pub admissibility_margin: f64,
}
