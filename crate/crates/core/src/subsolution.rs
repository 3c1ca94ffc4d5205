//! C-subsolutions: boundedness of `(μ + Γ_n) ∩ ∂Γ^σ` tested through `f_∞`,
//! certificates over sampled fields, and the dichotomy constant `κ`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::level_set::{check_level, entry_crossing, exit_crossing, radial_level};
use crate::linalg::Hermitian;
use crate::operator::{ExtendedReal, SymmetricOperator};
use crate::symmetric::{binomial, sigma_signed};

/// `μ` with the `i`-th entry removed.
pub fn omit(mu: &[f64], i: usize) -> Vec<f64> {
    mu.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect()
}

/// First index `i` with `f_∞(μ without i) ≤ σ`, with that limit.
fn first_unbounded(
    op: &SymmetricOperator,
    mu: &[f64],
    sigma: f64,
) -> Result<Option<(usize, ExtendedReal)>> {
    if mu.len() != op.dimension() {
        return Err(argument("dimension mismatch"));
    }
    if !op.cone().contains_tilde(mu) {
        return Err(Error::Domain("μ is outside Γ̃".into()));
    }
    if op.dimension() == 1 {
        // (μ + Γ_1) ∩ ∂Γ^σ is a single point.
        return Ok(None);
    }
    for i in 0..mu.len() {
        if mu[..i].contains(&mu[i]) {
            continue;
        }
        let limit = op.f_infinity(&omit(mu, i))?;
        if !limit.exceeds(sigma) {
            return Ok(Some((i, limit)));
        }
    }
    Ok(None)
}

/// `(μ + Γ_n) ∩ ∂Γ^σ` is bounded iff `f_∞(μ') > σ` for every `(n-1)`-subtuple.
pub fn is_c_subsolution_point(op: &SymmetricOperator, mu: &[f64], sigma: f64) -> Result<bool> {
    Ok(first_unbounded(op, mu, sigma)?.is_none())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Refuted {
        /// Grid index of the witness.
        point: usize,
        /// Entry dropped from `μ` to form the failing subtuple; absent when no
        /// candidate `δ` keeps `μ` in `Γ̃` at the witness.
        omitted: Option<usize>,
        f_infinity: Option<ExtendedReal>,
        sigma: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsolutionCertificate {
    pub delta: f64,
    /// Radius containing `(μ - 2δ𝟏 + Γ_n) ∩ ∂Γ^σ` at every checked point.
    pub radius: f64,
    pub kappa: f64,
    pub kappa_samples: usize,
    pub sigma_range: [f64; 2],
    pub verdict: Verdict,
}

impl SubsolutionCertificate {
    pub fn is_certified(&self) -> bool {
        matches!(self.verdict, Verdict::Certified)
    }
}

/// Options for [`certify_field`].
#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOptions {
    pub kappa_samples: usize,
    /// Radius cap beyond which a level-set crossing counts as missing.
    pub ray_limit: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { kappa_samples: 200, ray_limit: 1e12 }
    }
}

fn shifted(mu: &[f64], amount: f64) -> Vec<f64> {
    mu.iter().map(|x| x - amount).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest `|λ|` over the crossings of `∂Γ^σ` by rays from `μ` along each `e_i`,
/// along `𝟏`, and along `𝟏 + e_i`.
fn intersection_radius(op: &SymmetricOperator, mu: &[f64], sigma: f64, limit: f64) -> Result<f64> {
    let n = mu.len();
    let mut directions: Vec<Vec<f64>> = Vec::with_capacity(2 * n + 1);
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        directions.push(e);
        let mut d = vec![1.0; n];
        d[i] = 2.0;
        directions.push(d);
    }
    directions.push(vec![1.0; n]);
    let mut radius = 0.0f64;
    for d in &directions {
        let scale = norm(d);
        let t = entry_crossing(op, mu, d, sigma, limit / scale)?.ok_or_else(|| {
            Error::Numeric("level set not reached within the ray limit".into())
        })?;
        let hit: Vec<f64> = mu.iter().zip(d).map(|(m, x)| m + t * x).collect();
        radius = radius.max(norm(&hit));
    }
    Ok(radius)
}

/// Certify `u̲` from per-point eigenvalues of `B = α⁻¹(χ + ∂∂̄u̲)` and the
/// right-hand side `h`.
pub fn certify_field(
    op: &SymmetricOperator,
    b_eigs: &[Vec<f64>],
    h: &[f64],
    delta_grid: &[f64],
    options: &CertifyOptions,
    rng: &mut impl Rng,
) -> Result<SubsolutionCertificate> {
    if delta_grid.is_empty() {
        return Err(argument("delta grid is empty"));
    }
    if b_eigs.len() != h.len() || b_eigs.is_empty() {
        return Err(argument("eigenvalue and right-hand-side fields must share a nonempty grid"));
    }
    let sigma_range = [
        h.iter().copied().fold(f64::INFINITY, f64::min),
        h.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    ];
    for &s in &sigma_range {
        check_level(op, s)?;
    }
    let mut deltas: Vec<f64> = delta_grid.iter().copied().filter(|d| *d > 0.0).collect();
    if deltas.is_empty() {
        return Err(argument("delta grid has no positive entry"));
    }
    deltas.sort_by(|a, b| b.total_cmp(a));

    let mut witness = None;
    'delta: for &delta in &deltas {
        for (x, (eigs, &sigma)) in b_eigs.iter().zip(h).enumerate() {
            let mu = shifted(eigs, 2.0 * delta);
            match first_unbounded(op, &mu, sigma) {
                Ok(None) => {}
                Ok(Some((i, limit))) => {
                    witness = Some(Verdict::Refuted {
                        point: x,
                        omitted: Some(i),
                        f_infinity: Some(limit),
                        sigma,
                    });
                    continue 'delta;
                }
                Err(Error::Domain(_)) => {
                    witness = Some(Verdict::Refuted { point: x, omitted: None, f_infinity: None, sigma });
                    continue 'delta;
                }
                Err(e) => return Err(e),
            }
        }
        let mut radius = 0.0f64;
        for (eigs, &sigma) in b_eigs.iter().zip(h) {
            let mu = shifted(eigs, 2.0 * delta);
            radius = radius.max(intersection_radius(op, &mu, sigma, options.ray_limit)?);
        }
        let kappa = representative_kappa(op, b_eigs, h, radius, options.kappa_samples, rng)?;
        return Ok(SubsolutionCertificate {
            delta,
            radius,
            kappa,
            kappa_samples: options.kappa_samples,
            sigma_range,
            verdict: Verdict::Certified,
        });
    }
    Ok(SubsolutionCertificate {
        delta: 0.0,
        radius: 0.0,
        kappa: 0.0,
        kappa_samples: 0,
        sigma_range,
        verdict: witness.unwrap_or(Verdict::Certified),
    })
}

/// `κ` at the points with the smallest and largest `h` and at the first point.
fn representative_kappa(
    op: &SymmetricOperator,
    b_eigs: &[Vec<f64>],
    h: &[f64],
    radius: f64,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    if samples == 0 {
        return Ok(0.0);
    }
    let argmin = (0..h.len()).min_by(|&a, &b| h[a].total_cmp(&h[b])).unwrap_or(0);
    let argmax = (0..h.len()).max_by(|&a, &b| h[a].total_cmp(&h[b])).unwrap_or(0);
    let mut points = vec![0, argmin, argmax];
    points.dedup();
    let mut kappa = f64::INFINITY;
    for &x in &points {
        kappa = kappa.min(estimate_kappa(op, &b_eigs[x], h[x], radius, samples, rng)?.kappa);
    }
    Ok(kappa)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DichotomyBranch {
    /// `Σ f_i(λ)(μ_i - λ_i) > κ𝓕(λ)`.
    GradientPairing,
    /// `f_i(λ) > κ𝓕(λ)` for every `i`.
    AllLarge,
    Violation,
}

/// Largest `κ` for which the dichotomy holds at `λ`: the better of the two
/// branch ratios.
fn dichotomy_ratio(op: &SymmetricOperator, mu: &[f64], lambda: &[f64]) -> Result<f64> {
    let d = op.derivatives(lambda)?;
    let trace = d.trace();
    let pairing: f64 = d.grad.iter().zip(mu.iter().zip(lambda)).map(|(g, (m, l))| g * (m - l)).sum();
    let smallest = d.grad.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((pairing / trace).max(smallest / trace))
}

pub fn dichotomy_check(
    op: &SymmetricOperator,
    mu: &[f64],
    sigma: f64,
    lambda: &[f64],
    kappa: f64,
) -> Result<DichotomyBranch> {
    if mu.len() != op.dimension() || lambda.len() != op.dimension() {
        return Err(argument("dimension mismatch"));
    }
    let d = op.derivatives(lambda)?;
    if !((d.value - sigma).abs() < 1e-8) {
        return Err(argument(alloc::format!(
            "λ is not on the level set: f(λ) - σ = {}",
            d.value - sigma
        )));
    }
    let trace = d.trace();
    let pairing: f64 = d.grad.iter().zip(mu.iter().zip(lambda)).map(|(g, (m, l))| g * (m - l)).sum();
    if pairing > kappa * trace {
        Ok(DichotomyBranch::GradientPairing)
    } else if d.grad.iter().all(|&g| g > kappa * trace) {
        Ok(DichotomyBranch::AllLarge)
    } else {
        Ok(DichotomyBranch::Violation)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaEstimate {
    pub kappa: f64,
    pub samples: usize,
    /// Smallest per-sample dichotomy ratio seen.
    pub observed_floor: f64,
}

/// Points of `∂Γ^σ` with `|λ| > R`: from anchors `N𝟏 + L q` (`q` a random
/// positive unit vector, `L` log-uniform in `[R, 100R]`) walk along random
/// directions until leaving `Γ^σ`.
pub fn sample_far_level_set(
    op: &SymmetricOperator,
    sigma: f64,
    radius: f64,
    count: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<f64>>> {
    check_level(op, sigma)?;
    let n = op.dimension();
    let shift = radial_level(op, &vec![1.0; n], sigma)?;
    let base = radius.max(shift).max(1.0);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * count + 1000 {
            return Err(Error::Numeric("level-set sampling keeps missing |λ| > R".into()));
        }
        let q: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let qn = norm(&q);
        let length = base * Float::powf(100.0f64, rng.gen::<f64>());
        let anchor: Vec<f64> = q.iter().map(|x| shift + length * x / qn).collect();
        let dir: Vec<f64> = (0..n).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect();
        let dn = norm(&dir);
        if dn < 1e-6 {
            continue;
        }
        let dir: Vec<f64> = dir.iter().map(|x| x / dn).collect();
        let Some(t) = exit_crossing(op, &anchor, &dir, sigma, 1e4 * length)? else {
            continue;
        };
        let lambda: Vec<f64> = anchor.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
        if norm(&lambda) <= radius {
            continue;
        }
        match op.eval(&lambda) {
            Ok(v) if (v - sigma).abs() < 1e-8 => out.push(lambda),
            _ => continue,
        }
    }
    Ok(out)
}

/// Empirical `κ`: the largest `2^{-j}` not above `0.9` times the smallest
/// per-sample dichotomy ratio over `samples` far points of `∂Γ^σ`.
pub fn estimate_kappa(
    op: &SymmetricOperator,
    mu: &[f64],
    sigma: f64,
    radius: f64,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<KappaEstimate> {
    if samples == 0 {
        return Err(argument("estimate_kappa needs at least one sample"));
    }
    if !is_c_subsolution_point(op, mu, sigma)? {
        return Err(Error::Domain("μ is not a C-subsolution point at this level".into()));
    }
    let points = sample_far_level_set(op, sigma, radius, samples, rng)?;
    let mut floor = f64::INFINITY;
    for lambda in &points {
        floor = floor.min(dichotomy_ratio(op, mu, lambda)?);
    }
    if !(floor > 0.0) {
        return Err(Error::Numeric(alloc::format!("no positive κ: sampled dichotomy floor {floor}")));
    }
    let target = 0.9 * floor;
    let mut kappa = 1.0f64;
    while kappa > target {
        kappa *= 0.5;
    }
    if kappa * 2.0 <= target {
        while kappa * 2.0 <= target {
            kappa *= 2.0;
        }
    }
    Ok(KappaEstimate { kappa, samples, observed_floor: floor })
}

/// `Σ F_i B_ii ≥ Σ F_i μ_i` for ascending `F` and descending `μ = λ(B)`.
pub fn schur_horn_pairing(f_diag: &[f64], b: &Hermitian) -> Result<bool> {
    if f_diag.len() != b.dim() {
        return Err(argument("dimension mismatch"));
    }
    if f_diag.windows(2).any(|w| w[0] > w[1]) {
        return Err(argument("F diagonal must be sorted ascending"));
    }
    let mu = b.eigenvalues();
    let m = b.matrix();
    let lhs: f64 = f_diag.iter().enumerate().map(|(i, f)| f * m[(i, i)].re).sum();
    let rhs: f64 = f_diag.iter().zip(&mu).map(|(f, x)| f * x).sum();
    let scale: f64 = f_diag.iter().map(|f| f.abs()).sum::<f64>() * (1.0 + m.max_abs());
    Ok(lhs >= rhs - 1e-12 * scale)
}

/// Pointwise cone condition for the quotient equation: for every subtuple
/// `μ'` of `μ = λ(α⁻¹χ)`, `-(σ_{l-1}(μ')/C(n,l)) / (σ_{k-1}(μ')/C(n,k)) > -c`.
pub fn quotient_cone_condition(chi_eigs: &[f64], k: usize, l: usize, c: f64) -> Result<bool> {
    let n = chi_eigs.len();
    if !(l < k && k <= n) {
        return Err(argument("quotient condition needs 0 ≤ l < k ≤ n"));
    }
    crate::cone::ConeSpec::gamma_k(n, k)?.check(chi_eigs)?;
    if l == 0 {
        return Ok(true);
    }
    for i in 0..n {
        let sub = omit(chi_eigs, i);
        let num = sigma_signed(l as isize - 1, &sub) / binomial(n, l);
        let den = sigma_signed(k as isize - 1, &sub) / binomial(n, k);
        if !(-num / den > -c) {
            return Ok(false);
        }
    }
    Ok(true)
}
