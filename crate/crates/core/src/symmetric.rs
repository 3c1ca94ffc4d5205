//! Elementary symmetric polynomials.
//!
//! `σ_k(λ)` is evaluated with the prefix recurrence
//! `e_k(λ_1..λ_m) = e_k(λ_1..λ_{m-1}) + λ_m e_{k-1}(λ_1..λ_{m-1})`, which costs
//! `O(nk)` and never enumerates subsets.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{argument, Result};

/// `σ_k(λ)`; `σ_0 = 1`.
pub fn sigma(k: usize, lambda: &[f64]) -> Result<f64> {
    if k > lambda.len() {
        return Err(argument(alloc::format!(
            "sigma index k = {k} exceeds dimension {}",
            lambda.len()
        )));
    }
    Ok(sigma_skip(k, lambda, usize::MAX, usize::MAX))
}

/// `σ_j` for every `j = 0..=n`.
pub fn sigma_all(lambda: &[f64]) -> Vec<f64> {
    let n = lambda.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (m, &x) in lambda.iter().enumerate() {
        for j in (1..=m + 1).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

/// `σ_k` of `λ` with the entries at `skip_a` and `skip_b` removed. Negative
/// degrees give 0, degrees above the remaining length give 0.
pub(crate) fn sigma_skip(k: usize, lambda: &[f64], skip_a: usize, skip_b: usize) -> f64 {
    const STACK: usize = 17;
    if k == 0 {
        return 1.0;
    }
    let mut stack = [0.0f64; STACK];
    let mut heap;
    let e: &mut [f64] = if k < STACK {
        &mut stack[..=k]
    } else {
        heap = vec![0.0; k + 1];
        &mut heap
    };
    e[0] = 1.0;
    let mut m = 0usize;
    for (i, &x) in lambda.iter().enumerate() {
        if i == skip_a || i == skip_b {
            continue;
        }
        m += 1;
        for j in (1..=m.min(k)).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e[k]
}

/// `σ_j` with the convention `σ_j = 0` for `j < 0`.
pub(crate) fn sigma_signed(j: isize, lambda: &[f64]) -> f64 {
    if j < 0 || j as usize > lambda.len() {
        0.0
    } else {
        sigma_skip(j as usize, lambda, usize::MAX, usize::MAX)
    }
}

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Value, gradient and Hessian of `σ_k` at a point.
///
/// `∂σ_k/∂λ_i = σ_{k-1}(λ | i)` and `∂²σ_k/∂λ_i∂λ_j = σ_{k-2}(λ | i, j)` for
/// `i ≠ j`; the diagonal of the Hessian vanishes since `σ_k` is affine in each
/// variable.
#[derive(Debug, Clone)]
pub(crate) struct SigmaJet {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Row-major `n × n`.
    pub hess: Vec<f64>,
}

impl SigmaJet {
    pub fn new(k: usize, lambda: &[f64]) -> Self {
        let n = lambda.len();
        let value = if k > n { 0.0 } else { sigma_skip(k, lambda, usize::MAX, usize::MAX) };
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n * n];
        if k >= 1 {
            for (i, g) in grad.iter_mut().enumerate() {
                *g = sigma_skip(k - 1, lambda, i, usize::MAX);
            }
        }
        if k >= 2 {
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = sigma_skip(k - 2, lambda, i, j);
                    hess[i * n + j] = v;
                    hess[j * n + i] = v;
                }
            }
        }
        SigmaJet { value, grad, hess }
    }
}

/// Coefficients (ascending powers of `s`) of `σ_j(a_1 + s, …, a_m + s, b)`.
///
/// Used for limits along the rays `T(μ', R)` where all but one coordinate grow
/// at the same rate.
pub(crate) fn sigma_on_shifted_ray(j: usize, shifted: &[f64], fixed: f64) -> Vec<f64> {
    let m = shifted.len();
    let e = sigma_all(shifted);
    // σ_j(a + s) = Σ_i C(m - i, j - i) σ_i(a) s^{j - i}
    let shifted_poly = |deg: usize| -> Vec<f64> {
        let mut p = vec![0.0; deg + 1];
        if deg > m {
            return p;
        }
        for i in 0..=deg {
            p[deg - i] += binomial(m - i, deg - i) * e[i];
        }
        p
    };
    let mut out = vec![0.0; j + 1];
    for (d, c) in shifted_poly(j).into_iter().enumerate() {
        out[d] += c;
    }
    if j >= 1 {
        for (d, c) in shifted_poly(j - 1).into_iter().enumerate() {
            out[d] += fixed * c;
        }
    }
    out
}
