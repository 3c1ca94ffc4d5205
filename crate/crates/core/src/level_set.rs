//! Superlevel sets `Γ^σ = {λ ∈ Γ : f(λ) > σ}` and their boundaries.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::operator::SymmetricOperator;

/// `N` with `f(N·𝟏) = σ`, so `Γ + N𝟏 ⊂ Γ^σ`, and an empirical floor `τ` of
/// `𝓕` on `∂Γ^σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSetConstants {
    pub sigma: f64,
    pub shift: f64,
    pub tau: f64,
    pub samples: usize,
}

const BISECTION_STEPS: usize = 200;

/// Value of `f` at `λ`, or `None` outside the cone.
fn value(op: &SymmetricOperator, lambda: &[f64]) -> Option<f64> {
    if op.cone().contains(lambda) {
        Some(crate::operator::derivatives(op.kind(), op.dimension(), lambda).value)
    } else {
        None
    }
}

fn above(op: &SymmetricOperator, lambda: &[f64], sigma: f64) -> bool {
    matches!(value(op, lambda), Some(v) if v > sigma)
}

pub(crate) fn check_level(op: &SymmetricOperator, sigma: f64) -> Result<()> {
    if !sigma.is_finite() || !op.sup_boundary().below(sigma) || !op.sup_interior().exceeds(sigma) {
        return Err(argument(alloc::format!(
            "level σ = {sigma} must satisfy sup_∂Γ f = {} < σ < sup_Γ f = {}",
            op.sup_boundary(),
            op.sup_interior()
        )));
    }
    Ok(())
}

/// Bisect a predicate that is false at `lo` and true at `hi`; returns the
/// final `(false side, true side)` pair.
fn bisect(mut lo: f64, mut hi: f64, inside: impl Fn(f64) -> bool) -> (f64, f64) {
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// `s > 0` with `f(s·p) = σ` for a direction `p ∈ Γ`.
pub fn radial_level(op: &SymmetricOperator, p: &[f64], sigma: f64) -> Result<f64> {
    check_level(op, sigma)?;
    if !op.cone().contains(p) {
        return Err(Error::Domain("radial direction is outside the cone".into()));
    }
    let at = |s: f64| -> Vec<f64> { p.iter().map(|x| s * x).collect() };
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    let mut found = false;
    for _ in 0..400 {
        if !above(op, &at(lo), sigma) {
            found = true;
            break;
        }
        lo *= 0.5;
    }
    if !found {
        return Err(Error::Numeric("could not bracket the level set from below".into()));
    }
    found = false;
    for _ in 0..400 {
        if above(op, &at(hi), sigma) {
            found = true;
            break;
        }
        hi *= 2.0;
    }
    if !found {
        return Err(Error::Numeric("could not bracket the level set from above".into()));
    }
    Ok(bisect(lo, hi, |s| above(op, &at(s), sigma)).1)
}

/// First `t ∈ (0, t_max]` where the ray `origin + t·direction` enters `Γ^σ`, for
/// rays along which membership is monotone (for instance `direction ∈ Γ_n`).
/// `None` when the ray stays outside up to `t_max`.
pub fn entry_crossing(
    op: &SymmetricOperator,
    origin: &[f64],
    direction: &[f64],
    sigma: f64,
    t_max: f64,
) -> Result<Option<f64>> {
    check_level(op, sigma)?;
    let at = |t: f64| -> Vec<f64> { origin.iter().zip(direction).map(|(o, d)| o + t * d).collect() };
    if above(op, origin, sigma) {
        return Ok(Some(0.0));
    }
    if !above(op, &at(t_max), sigma) {
        return Ok(None);
    }
    Ok(Some(bisect(0.0, t_max, |t| above(op, &at(t), sigma)).1))
}

/// Last `t` along `origin + t·direction` still in `Γ^σ`, starting inside.
/// `Γ^σ` is convex, so the ray leaves at most once. `None` if it has not left by
/// `t_max`.
pub fn exit_crossing(
    op: &SymmetricOperator,
    origin: &[f64],
    direction: &[f64],
    sigma: f64,
    t_max: f64,
) -> Result<Option<f64>> {
    check_level(op, sigma)?;
    if !above(op, origin, sigma) {
        return Err(Error::Domain("ray origin is not inside the superlevel set".into()));
    }
    let at = |t: f64| -> Vec<f64> { origin.iter().zip(direction).map(|(o, d)| o + t * d).collect() };
    if above(op, &at(t_max), sigma) {
        return Ok(None);
    }
    let (t_in, _) = bisect(0.0, t_max, |t| !above(op, &at(t), sigma));
    Ok(Some(t_in))
}

/// A random direction in the cone, biased to spread over it.
pub(crate) fn random_cone_direction(op: &SymmetricOperator, rng: &mut impl Rng) -> Vec<f64> {
    let n = op.dimension();
    loop {
        let spread = 4.0 * rng.gen::<f64>();
        let p: Vec<f64> = (0..n).map(|_| 1.0 + spread * (2.0 * rng.gen::<f64>() - 1.0)).collect();
        if op.cone().contains(&p) {
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            return p.into_iter().map(|x| x / norm).collect();
        }
    }
}

pub fn level_set_constants(
    op: &SymmetricOperator,
    sigma: f64,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<LevelSetConstants> {
    check_level(op, sigma)?;
    if samples == 0 {
        return Err(argument("at least one sample is required"));
    }
    let n = op.dimension();
    let shift = radial_level(op, &vec![1.0; n], sigma)?;
    let mut tau = f64::INFINITY;
    for _ in 0..samples {
        let p = random_cone_direction(op, rng);
        let s = radial_level(op, &p, sigma)?;
        let lambda: Vec<f64> = p.iter().map(|x| s * x).collect();
        let d = op.derivatives(&lambda)?;
        tau = tau.min(d.trace());
    }
    Ok(LevelSetConstants { sigma, shift, tau, samples })
}
