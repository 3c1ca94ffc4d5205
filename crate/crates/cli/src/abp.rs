//! The ABP contact-set bound on the closed-form quadratic and on random wells.

use std::f64::consts::PI;

use fnell_core::diagnostics::{abp_check, AbpReport, SampledBall};
use rand::Rng;
use serde::Serialize;

use crate::problem::RunError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticCase {
    /// `v = 0.4|x|²`, `ε = 0.4`: `∫_P det D²v = 0.04π`.
    pub report: AbpReport,
    pub derived: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbpSuite {
    pub points: usize,
    pub quadratic: QuadraticCase,
    pub wells: Vec<AbpReport>,
    pub passed: bool,
}

/// `a|x - x₀|²` plus three small plane waves, with `ε` half the depth of the
/// well below the boundary minimum. Draws that are not wells are redrawn.
fn random_well(points: usize, rng: &mut impl Rng) -> Result<AbpReport, RunError> {
    loop {
        let a = rng.gen_range(0.3..1.5);
        let x0 = [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)];
        let waves: Vec<[f64; 4]> = (0..3)
            .map(|_| [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.0..2.0 * PI), 0.03 * a * rng.gen::<f64>()])
            .collect();
        let v = |x: &[f64]| {
            a * ((x[0] - x0[0]).powi(2) + (x[1] - x0[1]).powi(2))
                + waves.iter().map(|[k1, k2, ph, amp]| amp * (k1 * x[0] + k2 * x[1] + ph).sin()).sum::<f64>()
        };
        let ball = SampledBall::sample(2, points, v).map_err(fnell_torus::TorusError::from)?;
        let gap = ball.boundary_min() - ball.center_value();
        if gap > 0.0 {
            return Ok(abp_check(&ball, 0.5 * gap).map_err(fnell_torus::TorusError::from)?);
        }
    }
}

pub fn run_abp(points: usize, cases: usize, rng: &mut impl Rng) -> Result<AbpSuite, RunError> {
    let ball = SampledBall::sample(2, points, |x| 0.4 * (x[0] * x[0] + x[1] * x[1])).map_err(fnell_torus::TorusError::from)?;
    let report = abp_check(&ball, 0.4).map_err(fnell_torus::TorusError::from)?;
    let derived = 0.04 * PI;
    let relative_error = (report.integral_det - derived).abs() / derived;
    let quadratic = QuadraticCase { report, derived, relative_error };
    let wells = (0..cases).map(|_| random_well(points, rng)).collect::<Result<Vec<_>, _>>()?;
    let passed = quadratic.report.passed && relative_error < 0.05 && wells.iter().all(|w| w.passed);
    Ok(AbpSuite { points, quadratic, wells, passed })
}
