//! Operator property suite: derivative formulas against finite differences,
//! concavity, ellipticity, gradient comparability, and the subsolution
//! criterion against a ray oracle.

use fnell_core::calculus::{f_value, pairing, PointJet};
use fnell_core::level_set::entry_crossing;
use fnell_core::subsolution::{is_c_subsolution_point, omit};
use fnell_core::{CMatrix, ExtendedReal, Hermitian, SymmetricOperator};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorSuite {
    pub operator: String,
    pub cases: usize,
    /// Largest relative error of `F'` and `F''` against fourth-order central
    /// differences, over spectra with gap above `1e-3`.
    pub first_derivative_error: f64,
    pub second_derivative_error: f64,
    pub concavity_violations: usize,
    pub ellipticity_failures: usize,
    pub comparability_failures: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayAgreement {
    pub cases: usize,
    pub disagreements: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub operators: Vec<OperatorSuite>,
    pub subsolution_rays: RayAgreement,
    pub passed: bool,
}

fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in (i + 1)..n {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Inside the cone with sup-distance at least `0.5` from its boundary.
fn admissible_spectrum(op: &SymmetricOperator, rng: &mut impl Rng) -> Vec<f64> {
    let mut lambda: Vec<f64> = (0..op.dimension()).map(|_| rng.gen_range(-1.5..4.0)).collect();
    while !op.cone().contains(&lambda) {
        lambda.iter_mut().for_each(|x| *x += 0.25);
    }
    lambda.iter_mut().for_each(|x| *x += 0.5);
    lambda
}

fn min_gap(lambda: &[f64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..lambda.len() {
        for j in (i + 1)..lambda.len() {
            gap = gap.min((lambda[i] - lambda[j]).abs());
        }
    }
    gap
}

pub fn operator_suite(op: &SymmetricOperator, cases: usize, rng: &mut impl Rng) -> OperatorSuite {
    let n = op.dimension();
    let (h1, h2) = (1e-3, 1e-2);
    let mut s = OperatorSuite {
        operator: op.name(),
        cases: 0,
        first_derivative_error: 0.0,
        second_derivative_error: 0.0,
        concavity_violations: 0,
        ellipticity_failures: 0,
        comparability_failures: 0,
        passed: false,
    };
    for _ in 0..cases {
        let lambda = admissible_spectrum(op, rng);
        let frame = Hermitian::from_trusted(random_hermitian(n, rng)).eigen().vectors;
        let a = Hermitian::from_trusted(frame.mul(&CMatrix::diagonal(&lambda)).mul(&frame.adjoint()));
        let dir = Hermitian::from_trusted(random_hermitian(n, rng));
        let Ok(jet) = PointJet::new(op, &a) else {
            s.ellipticity_failures += 1;
            continue;
        };
        let f = |t: f64| f_value(op, &Hermitian::from_trusted(a.matrix().add(&dir.matrix().scale(t)))).unwrap_or(f64::NAN);
        let st = |h: f64| [f(-2.0 * h), f(-h), f(0.0), f(h), f(2.0 * h)];
        let [a2, a1, _, b1, b2] = st(h1);
        let first_fd = (a2 - 8.0 * a1 + 8.0 * b1 - b2) / (12.0 * h1);
        let v = st(h2);
        let second_fd = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h2 * h2);
        let big = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let first = pairing(&jet.first_derivative(), dir.matrix());
        let second = jet.second_form(&dir);
        if min_gap(&lambda) > 1e-3 {
            let rel = |x: f64, y: f64, floor: f64| (x - y).abs() / x.abs().max(y.abs()).max(floor);
            s.first_derivative_error = s.first_derivative_error.max(rel(first, first_fd, 2.0 * f64::EPSILON * big / h1));
            s.second_derivative_error = s.second_derivative_error.max(rel(second, second_fd, 6.0 * f64::EPSILON * big / (h2 * h2)));
        }
        let d = &jet.derivs;
        let scale = 1.0 + d.hess.iter().fold(0.0f64, |m, x| m.max(x.abs())) + d.trace();
        if second / scale > 1e-9 {
            s.concavity_violations += 1;
        }
        if d.grad.iter().any(|&g| !(g > 0.0)) {
            s.ellipticity_failures += 1;
        }
        let norm = d.grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        let trace = d.trace();
        if !(norm <= trace * (1.0 + 1e-15) && trace <= (n as f64).sqrt() * norm * (1.0 + 1e-15)) {
            s.comparability_failures += 1;
        }
        s.cases += 1;
    }
    s.passed = s.cases == cases
        && s.first_derivative_error < 1e-5
        && s.second_derivative_error < 1e-5
        && s.concavity_violations == 0
        && s.ellipticity_failures == 0
        && s.comparability_failures == 0;
    s
}

/// `true` when every ray from `μ` into `μ + Γ_n` meets `∂Γ^σ` within radius 1e6.
fn rays_bounded(op: &SymmetricOperator, mu: &[f64], sigma: f64, rays: usize, rng: &mut impl Rng) -> bool {
    let n = mu.len();
    let mut dirs: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    while dirs.len() < rays {
        dirs.push((0..n).map(|_| rng.gen::<f64>()).collect());
    }
    dirs.iter().all(|d| {
        let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        let unit: Vec<f64> = d.iter().map(|x| x / norm).collect();
        match entry_crossing(op, mu, &unit, sigma, 2e6) {
            Ok(Some(t)) => mu.iter().zip(&unit).map(|(m, u)| (m + t * u).powi(2)).sum::<f64>().sqrt() < 1e6,
            _ => false,
        }
    })
}

pub fn ray_agreement(cases: usize, rng: &mut impl Rng) -> RayAgreement {
    let mut done = 0;
    let mut disagreements = 0;
    while done < cases {
        let n = rng.gen_range(2..=3);
        let op = match rng.gen_range(0..3) {
            0 => SymmetricOperator::monge_ampere(n),
            1 => SymmetricOperator::log_sigma_k(n, rng.gen_range(1..=n)),
            _ => {
                let k = rng.gen_range(2..=n);
                SymmetricOperator::hessian_quotient(n, rng.gen_range(1..k), k)
            }
        }
        .expect("valid parameters");
        let mu: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
        let sigma = match op.sup_interior() {
            ExtendedReal::Finite(_) => -rng.gen_range(0.05..2.0),
            _ => rng.gen_range(-2.0..4.0),
        };
        // A finite radius cannot decide draws sitting on a finite f_∞.
        let critical = (0..n).any(|i| matches!(op.f_infinity(&omit(&mu, i)), Ok(ExtendedReal::Finite(l)) if (l - sigma).abs() < 0.02));
        if critical {
            continue;
        }
        let claimed = is_c_subsolution_point(&op, &mu, sigma);
        if claimed != Ok(rays_bounded(&op, &mu, sigma, 200, rng)) {
            disagreements += 1;
        }
        done += 1;
    }
    RayAgreement { cases, disagreements, passed: disagreements == 0 }
}

/// Every operator kind for `n ∈ {2, 3}`.
pub fn all_operators() -> Vec<SymmetricOperator> {
    let mut ops = Vec::new();
    for n in [2, 3] {
        for k in 1..=n {
            ops.push(SymmetricOperator::log_sigma_k(n, k).expect("valid"));
        }
        ops.push(SymmetricOperator::monge_ampere(n).expect("valid"));
        for k in 2..=n {
            for l in 1..k {
                ops.push(SymmetricOperator::hessian_quotient(n, l, k).expect("valid"));
                ops.push(SymmetricOperator::blended_quotient(n, l, k, 0.5).expect("valid"));
            }
        }
        for k in 1..n {
            ops.push(SymmetricOperator::inverse_sigma_k(n, k).expect("valid"));
        }
        ops.push(SymmetricOperator::composed_with_t(SymmetricOperator::monge_ampere(n).expect("valid")).expect("valid"));
        ops.push(SymmetricOperator::composed_with_t(SymmetricOperator::log_sigma_k(n, 1).expect("valid")).expect("valid"));
    }
    ops
}

pub fn run_selftest(cases: usize, rng: &mut impl Rng) -> SelftestReport {
    let operators: Vec<OperatorSuite> = all_operators().iter().map(|op| operator_suite(op, cases, rng)).collect();
    let subsolution_rays = ray_agreement(cases.min(100), rng);
    let passed = operators.iter().all(|s| s.passed) && subsolution_rays.passed;
    SelftestReport { operators, subsolution_rays, passed }
}
