//! Diagnostics that need no torus: the ABP contact-set bound on a sampled ball
//! and the strong-concavity conditions on `f`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::operator::SymmetricOperator;

/// Values of `v` on the cell-centred grid of `[-1, 1]^m` restricted to the
/// unit ball, plus `v(0)` and samples on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledBall {
    dim: usize,
    points: usize,
    spacing: f64,
    /// Full cube grid, row-major; NaN outside the ball.
    values: Vec<f64>,
    /// The whole 3^m stencil around the point lies in the ball.
    interior: Vec<bool>,
    center_value: f64,
    boundary_min: f64,
}

fn unravel(mut idx: usize, dim: usize, points: usize) -> Vec<usize> {
    let mut out = vec![0; dim];
    for a in (0..dim).rev() {
        out[a] = idx % points;
        idx /= points;
    }
    out
}

fn ravel(multi: &[usize], points: usize) -> usize {
    multi.iter().fold(0, |acc, &i| acc * points + i)
}

impl SampledBall {
    /// Sample `v` on a grid with `points` cells per axis.
    pub fn sample(dim: usize, points: usize, v: impl Fn(&[f64]) -> f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(argument("ball dimension must be 1, 2 or 3"));
        }
        if points < 8 {
            return Err(argument("at least 8 points per axis are required"));
        }
        let spacing = 2.0 / points as f64;
        let total = points.pow(dim as u32);
        let coord = |i: usize| -1.0 + (i as f64 + 0.5) * spacing;
        let mut values = vec![f64::NAN; total];
        let mut inside = vec![false; total];
        for (idx, slot) in values.iter_mut().enumerate() {
            let x: Vec<f64> = unravel(idx, dim, points).into_iter().map(coord).collect();
            if x.iter().map(|c| c * c).sum::<f64>() < 1.0 {
                *slot = v(&x);
                inside[idx] = true;
            }
        }
        let mut interior = vec![false; total];
        let mut boundary_min = f64::INFINITY;
        let offsets = stencil(dim);
        for idx in 0..total {
            if !inside[idx] {
                continue;
            }
            let multi = unravel(idx, dim, points);
            let all_in = offsets.iter().all(|off| {
                neighbour(&multi, off, points).is_some_and(|j| inside[j])
            });
            interior[idx] = all_in;
            if !all_in {
                let x: Vec<f64> = multi.iter().map(|&i| coord(i)).collect();
                let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                let on_sphere: Vec<f64> = x.iter().map(|c| c / r).collect();
                boundary_min = boundary_min.min(v(&on_sphere));
            }
        }
        let center_value = v(&vec![0.0; dim]);
        if values.iter().zip(&inside).any(|(x, &i)| i && !x.is_finite()) || !center_value.is_finite() {
            return Err(argument("sampled function is not finite on the ball"));
        }
        Ok(SampledBall { dim, points, spacing, values, interior, center_value, boundary_min })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn center_value(&self) -> f64 {
        self.center_value
    }

    pub fn boundary_min(&self) -> f64 {
        self.boundary_min
    }

    pub fn coordinates(&self, idx: usize) -> Vec<f64> {
        unravel(idx, self.dim, self.points)
            .into_iter()
            .map(|i| -1.0 + (i as f64 + 0.5) * self.spacing)
            .collect()
    }

    fn at(&self, multi: &[usize], off: &[isize]) -> f64 {
        let j = neighbour(multi, off, self.points).expect("stencil inside the grid");
        self.values[j]
    }

    fn gradient(&self, multi: &[usize]) -> Vec<f64> {
        let m = self.dim;
        (0..m)
            .map(|a| {
                let mut plus = vec![0isize; m];
                let mut minus = vec![0isize; m];
                plus[a] = 1;
                minus[a] = -1;
                (self.at(multi, &plus) - self.at(multi, &minus)) / (2.0 * self.spacing)
            })
            .collect()
    }

    fn hessian(&self, multi: &[usize]) -> Vec<f64> {
        let m = self.dim;
        let h2 = self.spacing * self.spacing;
        let centre = self.at(multi, &vec![0; m]);
        let mut out = vec![0.0; m * m];
        for a in 0..m {
            for b in a..m {
                let value = if a == b {
                    let mut p = vec![0isize; m];
                    let mut q = vec![0isize; m];
                    p[a] = 1;
                    q[a] = -1;
                    (self.at(multi, &p) - 2.0 * centre + self.at(multi, &q)) / h2
                } else {
                    let corner = |sa: isize, sb: isize| {
                        let mut o = vec![0isize; m];
                        o[a] = sa;
                        o[b] = sb;
                        self.at(multi, &o)
                    };
                    (corner(1, 1) - corner(1, -1) - corner(-1, 1) + corner(-1, -1)) / (4.0 * h2)
                };
                out[a * m + b] = value;
                out[b * m + a] = value;
            }
        }
        out
    }
}

fn stencil(dim: usize) -> Vec<Vec<isize>> {
    (0..3usize.pow(dim as u32))
        .map(|k| unravel(k, dim, 3).into_iter().map(|d| d as isize - 1).collect())
        .collect()
}

fn neighbour(multi: &[usize], off: &[isize], points: usize) -> Option<usize> {
    let mut moved = Vec::with_capacity(multi.len());
    for (&i, &o) in multi.iter().zip(off) {
        let j = i as isize + o;
        if j < 0 || j >= points as isize {
            return None;
        }
        moved.push(j as usize);
    }
    Some(ravel(&moved, points))
}

fn determinant(m: usize, a: &[f64]) -> f64 {
    match m {
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        _ => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
    }
}

/// Volume of the unit ball in `ℝ^m`, `m ≤ 3`.
pub fn unit_ball_volume(m: usize) -> f64 {
    match m {
        1 => 2.0,
        2 => PI,
        _ => 4.0 * PI / 3.0,
    }
}

fn check_precondition(ball: &SampledBall, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) {
        return Err(argument("ε must be positive"));
    }
    let slack = 1e-12 * (1.0 + ball.center_value.abs() + ball.boundary_min.abs());
    if ball.center_value + epsilon > ball.boundary_min + slack {
        return Err(argument(alloc::format!(
            "v(0) + ε = {} exceeds the boundary minimum {}",
            ball.center_value + epsilon,
            ball.boundary_min
        )));
    }
    Ok(())
}

/// Interior grid points with `|Dv| < ε/2` admitting a global lower
/// supporting plane of slope `Dv` over every sample.
pub fn contact_set(ball: &SampledBall, epsilon: f64) -> Result<Vec<usize>> {
    Ok(weighted_contact(ball, epsilon)?
        .into_iter()
        .filter(|c| c.inside)
        .map(|c| c.index)
        .collect())
}

struct ContactCell {
    index: usize,
    inside: bool,
    /// Fraction of the cell on the `|Dv| < ε/2` side.
    weight: f64,
}

/// Supported grid points whose cell meets `{|Dv| < ε/2}`. A cell cut by the
/// level set `|Dv| = ε/2` gets the fraction on the inner side of its tangent
/// line; a hard indicator costs O(h/r) on contact sets a few cells wide.
fn weighted_contact(ball: &SampledBall, epsilon: f64) -> Result<Vec<ContactCell>> {
    check_precondition(ball, epsilon)?;
    let scale = ball
        .values
        .iter()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * (1.0 + scale);
    let samples: Vec<(Vec<f64>, f64)> = (0..ball.values.len())
        .filter(|&j| ball.values[j].is_finite())
        .map(|j| (ball.coordinates(j), ball.values[j]))
        .collect();
    let m = ball.dim;
    let mut out = Vec::new();
    for idx in 0..ball.values.len() {
        if !ball.interior[idx] {
            continue;
        }
        let multi = unravel(idx, m, ball.points);
        let g = ball.gradient(&multi);
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let excess = norm - 0.5 * epsilon;
        let weight = if norm == 0.0 {
            1.0
        } else {
            // ∇|Dv| = D²v Dv / |Dv|; the cell's width along it is h·|n|_1.
            let hess = ball.hessian(&multi);
            let normal: Vec<f64> = (0..m)
                .map(|a| (0..m).map(|b| hess[a * m + b] * g[b]).sum::<f64>() / norm)
                .collect();
            let slope = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
            if slope == 0.0 {
                if excess < 0.0 { 1.0 } else { 0.0 }
            } else {
                let width = ball.spacing * normal.iter().map(|x| x.abs()).sum::<f64>() / slope;
                (0.5 - excess / slope / width).clamp(0.0, 1.0)
            }
        };
        if weight == 0.0 && excess >= 0.0 {
            continue;
        }
        let x = ball.coordinates(idx);
        let vx = ball.values[idx];
        let supported = samples.iter().all(|(y, vy)| {
            let lin: f64 = g.iter().zip(y.iter().zip(&x)).map(|(gi, (yi, xi))| gi * (yi - xi)).sum();
            *vy >= vx + lin - tol
        });
        if supported {
            out.push(ContactCell { index: idx, inside: excess < 0.0, weight });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbpReport {
    pub epsilon: f64,
    pub contact_points: usize,
    /// `|P| / |B(1)|`.
    pub contact_volume_fraction: f64,
    pub integral_det: f64,
    /// `c₀ ε^m` with `c₀ = ω_m / 2^m`.
    pub lower_bound: f64,
    /// Relative quadrature allowance used for `passed`.
    pub grid_tolerance: f64,
    pub passed: bool,
}

/// Relative quadrature error allowed by [`abp_check`]; the bound is sharp
/// whenever `Dv` is injective on `P`, so the comparison is made up to grid
/// error.
pub const ABP_GRID_TOLERANCE: f64 = 0.05;

pub fn abp_check(ball: &SampledBall, epsilon: f64) -> Result<AbpReport> {
    abp_check_with_tolerance(ball, epsilon, ABP_GRID_TOLERANCE)
}

pub fn abp_check_with_tolerance(ball: &SampledBall, epsilon: f64, tolerance: f64) -> Result<AbpReport> {
    let contact = weighted_contact(ball, epsilon)?;
    let m = ball.dim;
    let cell = Float::powi(ball.spacing, m as i32);
    let integral_det: f64 = contact
        .iter()
        .map(|c| c.weight * determinant(m, &ball.hessian(&unravel(c.index, m, ball.points))) * cell)
        .sum();
    let c0 = unit_ball_volume(m) / Float::powi(2.0, m as i32);
    let lower_bound = c0 * Float::powi(epsilon, m as i32);
    Ok(AbpReport {
        epsilon,
        contact_points: contact.iter().filter(|c| c.inside).count(),
        contact_volume_fraction: contact.iter().map(|c| c.weight).sum::<f64>() * cell / unit_ball_volume(m),
        integral_det,
        lower_bound,
        grid_tolerance: tolerance,
        passed: integral_det >= (1.0 - tolerance) * lower_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongConcavityFlags {
    /// `f_11 + f_1/λ_1 ≤ 0` at every sample.
    pub first: bool,
    /// `λ_1 f_1 ≤ λ_i f_i` for every `i` at every sample.
    pub second: bool,
    pub per_sample: Vec<(bool, bool)>,
}

/// Evaluate both conditions with `λ_1` the largest entry; equalities are
/// accepted up to `1e-12` relative.
pub fn strong_concavity_flags(op: &SymmetricOperator, samples: &[Vec<f64>]) -> Result<StrongConcavityFlags> {
    if samples.is_empty() {
        return Err(argument("no samples"));
    }
    let n = op.dimension();
    let mut per_sample = Vec::with_capacity(samples.len());
    for raw in samples {
        let mut lambda = raw.clone();
        lambda.sort_by(|a, b| b.total_cmp(a));
        let d = op.derivatives(&lambda)?;
        let (f1, f11, l1) = (d.grad[0], d.hess[0], lambda[0]);
        let first_sum = f11 + f1 / l1;
        let first = first_sum <= 1e-12 * (f11.abs() + (f1 / l1).abs());
        let top = l1 * f1;
        let second = (0..n).all(|i| {
            let other = lambda[i] * d.grad[i];
            top <= other + 1e-12 * (top.abs() + other.abs())
        });
        per_sample.push((first, second));
    }
    Ok(StrongConcavityFlags {
        first: per_sample.iter().all(|s| s.0),
        second: per_sample.iter().all(|s| s.1),
        per_sample,
    })
}
