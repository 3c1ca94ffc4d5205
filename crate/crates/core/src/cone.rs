//! Admissible cones: `Γ_k = {σ_1, …, σ_k > 0}` and preimages `T⁻¹(Γ)` under the
//! averaging map `T(λ)_k = (Σ_{i≠k} λ_i)/(n-1)`.
//!
//! Membership is strict with no tolerance: the cones are open. Solvers that need
//! a soft measure use [`ConeSpec::margin`].

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::symmetric::sigma_skip;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ConeKind {
    GammaK(usize),
    PreimageUnderT(Box<ConeSpec>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    n: usize,
    kind: ConeKind,
}

impl ConeSpec {
    pub fn gamma_k(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k == 0 || k > n {
            return Err(argument(alloc::format!("Γ_k needs 1 ≤ k ≤ n, got k = {k}, n = {n}")));
        }
        Ok(ConeSpec { n, kind: ConeKind::GammaK(k) })
    }

    /// The positive orthant `Γ_n`.
    pub fn positive(n: usize) -> Result<Self> {
        Self::gamma_k(n, n)
    }

    pub fn preimage_under_t(inner: ConeSpec) -> Result<Self> {
        if inner.n < 2 {
            return Err(argument("T is only defined for n ≥ 2"));
        }
        Ok(ConeSpec { n: inner.n, kind: ConeKind::PreimageUnderT(Box::new(inner)) })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &ConeKind {
        &self.kind
    }

    /// True for `Γ_n` itself.
    pub fn is_positive_orthant(&self) -> bool {
        matches!(self.kind, ConeKind::GammaK(k) if k == self.n)
    }

    pub fn contains(&self, lambda: &[f64]) -> bool {
        self.check(lambda).is_ok()
    }

    /// `Ok` inside the cone, otherwise the first violated `σ_j`.
    pub fn check(&self, lambda: &[f64]) -> Result<()> {
        if lambda.len() != self.n {
            return Err(argument("dimension mismatch in cone membership"));
        }
        if lambda.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite eigenvalue".into()));
        }
        match &self.kind {
            ConeKind::GammaK(k) => {
                for j in 1..=*k {
                    let s = sigma_skip(j, lambda, usize::MAX, usize::MAX);
                    if !(s > 0.0) {
                        return Err(Error::OutsideCone { index: j, value: s });
                    }
                }
                Ok(())
            }
            ConeKind::PreimageUnderT(inner) => inner.check(&t_map_unchecked(lambda)),
        }
    }

    /// `min_j σ_j` over the defining polynomials (positive iff inside).
    pub fn margin(&self, lambda: &[f64]) -> f64 {
        match &self.kind {
            ConeKind::GammaK(k) => (1..=*k)
                .map(|j| sigma_skip(j, lambda, usize::MAX, usize::MAX))
                .fold(f64::INFINITY, f64::min),
            ConeKind::PreimageUnderT(inner) => inner.margin(&t_map_unchecked(lambda)),
        }
    }

    /// Membership of `μ'` in the projection `Γ_∞ ⊂ ℝ^{n-1}`: some `(μ', t)` lies in
    /// `Γ`. Tested on a geometric ladder of `t` values.
    pub fn contains_projection(&self, mu_prime: &[f64]) -> bool {
        if mu_prime.len() + 1 != self.n {
            return false;
        }
        let scale = 1.0 + mu_prime.iter().map(|x| x.abs()).sum::<f64>();
        let mut buf: Vec<f64> = mu_prime.to_vec();
        buf.push(0.0);
        ladder(scale).any(|t| {
            buf[self.n - 1] = t;
            self.contains(&buf)
        })
    }

    /// Membership in `Γ̃ = {μ : ∃ t > 0, μ + t e_i ∈ Γ for all i}`.
    pub fn contains_tilde(&self, mu: &[f64]) -> bool {
        if mu.len() != self.n {
            return false;
        }
        let scale = 1.0 + mu.iter().map(|x| x.abs()).sum::<f64>();
        let mut buf = mu.to_vec();
        ladder(scale).any(|t| {
            (0..self.n).all(|i| {
                buf[i] = mu[i] + t;
                let ok = self.contains(&buf);
                buf[i] = mu[i];
                ok
            })
        })
    }
}

fn ladder(scale: f64) -> impl Iterator<Item = f64> {
    (0..=13).map(move |j| scale * Float::powi(10.0f64, j))
}

/// `T(λ)_k = (σ_1(λ) - λ_k)/(n-1)`.
pub fn t_map(lambda: &[f64]) -> Result<Vec<f64>> {
    if lambda.len() < 2 {
        return Err(argument("T requires n ≥ 2"));
    }
    Ok(t_map_unchecked(lambda))
}

pub(crate) fn t_map_unchecked(lambda: &[f64]) -> Vec<f64> {
    let n = lambda.len();
    let total: f64 = lambda.iter().sum();
    let d = (n - 1) as f64;
    lambda.iter().map(|x| (total - x) / d).collect()
}

/// `Γ' = {x' ∈ ℝ^{n-1} : (x', 0) ∈ Γ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedCone {
    parent: ConeSpec,
    /// Set when the parent is `Γ_n`; membership then falls back to `Γ_{n-1}`.
    pub orthant_convention: bool,
}

impl ProjectedCone {
    pub fn dimension(&self) -> usize {
        self.parent.n - 1
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() + 1 != self.parent.n {
            return false;
        }
        if self.orthant_convention {
            return x.iter().all(|&v| v > 0.0);
        }
        let mut buf = x.to_vec();
        buf.push(0.0);
        self.parent.contains(&buf)
    }
}

pub fn project_cone(cone: &ConeSpec) -> Result<ProjectedCone> {
    if cone.n < 2 {
        return Err(argument("projection needs n ≥ 2"));
    }
    Ok(ProjectedCone { parent: cone.clone(), orthant_convention: cone.is_positive_orthant() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn gamma_k_membership() {
        let g2 = ConeSpec::gamma_k(3, 2).unwrap();
        assert!(!g2.contains(&[1.0, 1.0, -0.5]));
        assert_eq!(
            g2.check(&[1.0, 1.0, -0.5]),
            Err(Error::OutsideCone { index: 2, value: 0.0 })
        );
        let gn = ConeSpec::positive(4).unwrap();
        assert!(gn.contains(&[1.0; 4]));
        assert!(!gn.contains(&[1.0, 1.0, 1.0, 0.0]));
    }

    #[test]
    fn t_map_examples() {
        assert_eq!(t_map(&[3.0, -2.0]).unwrap(), vec![-2.0, 3.0]);
        assert_eq!(t_map(&[2.0, 2.0, 2.0]).unwrap(), vec![2.0, 2.0, 2.0]);
        assert_eq!(t_map(&[4.0, 1.0, -1.0]).unwrap(), vec![0.0, 1.5, 2.5]);
        assert!(t_map(&[1.0]).is_err());
    }

    #[test]
    fn preimage_membership() {
        let c = ConeSpec::preimage_under_t(ConeSpec::gamma_k(3, 2).unwrap()).unwrap();
        assert!(c.contains(&[4.0, 1.0, -1.0]));
        // T(λ) = (−1, 0.5, 1.5): σ_1 = 1, σ_2 = −0.5 − 1.5 + 0.75 < 0
        assert!(!c.contains(&[3.0, 0.0, -2.0]));
    }

    #[test]
    fn projections() {
        let p = project_cone(&ConeSpec::gamma_k(3, 2).unwrap()).unwrap();
        assert!(p.contains(&[1.0, 1.0]));
        assert!(!p.contains(&[1.0, -1.0]));
        let p1 = project_cone(&ConeSpec::gamma_k(3, 1).unwrap()).unwrap();
        assert!(p1.contains(&[3.0, -1.0]));
        let pn = project_cone(&ConeSpec::positive(3).unwrap()).unwrap();
        assert!(pn.orthant_convention);
        assert!(pn.contains(&[0.5, 0.5]));
        assert!(project_cone(&ConeSpec::positive(1).unwrap()).is_err());
    }

    #[test]
    fn gamma_infinity_and_tilde() {
        let g2 = ConeSpec::gamma_k(3, 2).unwrap();
        // Γ_∞ of Γ_2 in ℝ³ is Γ_1 in ℝ².
        assert!(g2.contains_projection(&[3.0, -1.0]));
        assert!(!g2.contains_projection(&[-1.0, -1.0]));
        let gn = ConeSpec::positive(2).unwrap();
        assert!(gn.contains_tilde(&[0.1, 0.2]));
        assert!(!gn.contains_tilde(&[-0.1, 0.2]));
    }
}
