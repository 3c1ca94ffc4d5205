//! Certification of the trivial subsolution `u̲ = 0` at the level the chosen
//! path ends on.

use fnell_core::subsolution::{certify_field, quotient_cone_condition, CertifyOptions, SubsolutionCertificate, Verdict};
use fnell_core::OperatorKind;
use fnell_torus::geometry::{compute_c, form_ratio, integral, relative_eigenvalues};
use fnell_torus::solver::PathKind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::problem::{Problem, RunError};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificationStatus {
    Certified,
    Refuted,
    NotApplicable,
}

/// The pointwise quotient condition evaluated at `c = compute_c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientCondition {
    pub c: f64,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub status: CertificationStatus,
    /// How the level `σ(x)` was chosen.
    pub level: String,
    /// Constant added to `h` (or the level itself on the quotient path).
    pub level_shift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SubsolutionCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_coordinates: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient_condition: Option<QuotientCondition>,
}

impl CertificationReport {
    pub fn refuted(&self) -> bool {
        self.status == CertificationStatus::Refuted
    }
}

/// `σ(x)` at which `u̲ = 0` is tested, with a description.
fn target_level(problem: &Problem, path: PathKind) -> Result<Option<(Vec<f64>, f64, String)>, RunError> {
    let Problem { op, alpha, chi, h, .. } = problem;
    match path {
        PathKind::Riemannian => Ok(None),
        PathKind::Quotient => {
            let (l, k) = match op.kind() {
                OperatorKind::HessianQuotientNeg { l, k } => (*l, *k),
                _ => unreachable!("quotient path is validated against the operator"),
            };
            let c = compute_c(chi, alpha, l, k)?;
            Ok(Some((vec![-c; h.values().len()], -c, "-c with c = compute_c(χ, l, k)".into())))
        }
        PathKind::Fixed | PathKind::Hessian => {
            // For log σ_k the constant is fixed by integrating the equation.
            let k = match op.kind() {
                OperatorKind::LogSigmaK { k } => Some(*k),
                OperatorKind::MongeAmpere => Some(op.dimension()),
                _ => None,
            };
            let offset = op.form_offset();
            let (shift, how) = match k {
                Some(k) => {
                    let lhs = integral(&form_ratio(chi, alpha, k)?, None)?;
                    let rhs = integral(&h.map(f64::exp), None)?;
                    ((lhs / rhs).ln(), "h + c with c = log(∫χ^k∧α^{n-k} / ∫e^h α^n)".to_string())
                }
                None => (0.0, "h (the constant is not known before solving)".to_string()),
            };
            let shift = shift + offset;
            Ok(Some((h.values().iter().map(|v| v + shift).collect(), shift, how)))
        }
    }
}

pub fn certify(problem: &Problem, cfg: &RunConfig) -> Result<CertificationReport, RunError> {
    let Some((sigma, shift, level)) = target_level(problem, cfg.path.kind)? else {
        return Ok(CertificationReport {
            status: CertificationStatus::NotApplicable,
            level: "the Riemannian path is anchored at u = 0 by construction".into(),
            level_shift: 0.0,
            certificate: None,
            witness_coordinates: None,
            quotient_condition: None,
        });
    };
    let eigs = relative_eigenvalues(&problem.alpha, &problem.chi);
    let options = CertifyOptions { kappa_samples: cfg.certify.kappa_samples, ..CertifyOptions::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cert = certify_field(&problem.op, &eigs, &sigma, &cfg.certify.delta_grid, &options, &mut rng)
        .map_err(fnell_torus::TorusError::from)?;
    let witness_coordinates = match &cert.verdict {
        Verdict::Refuted { point, .. } => Some(problem.grid.coordinates(*point)),
        Verdict::Certified => None,
    };
    let quotient_condition = match (cfg.path.kind, problem.op.kind()) {
        (PathKind::Quotient, OperatorKind::HessianQuotientNeg { l, k }) => {
            let c = -shift;
            let mut first_failure = None;
            for (x, mu) in eigs.iter().enumerate() {
                // Points outside Γ_k fail the condition outright.
                if !quotient_cone_condition(mu, *k, *l, c).unwrap_or(false) {
                    first_failure = Some(x);
                    break;
                }
            }
            Some(QuotientCondition { c, holds: first_failure.is_none(), first_failure })
        }
        _ => None,
    };
    let certified = cert.is_certified() && quotient_condition.as_ref().is_none_or(|q| q.holds);
    Ok(CertificationReport {
        status: if certified { CertificationStatus::Certified } else { CertificationStatus::Refuted },
        level,
        level_shift: shift,
        certificate: Some(cert),
        witness_coordinates,
        quotient_condition,
    })
}
