//! The symmetric functions `f` on their cones.
//!
//! Every kind is smooth, symmetric, strictly increasing in each variable and
//! concave on its cone. Values, gradients and Hessians are computed in closed
//! form from the derivatives of `σ_k`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::cone::{t_map_unchecked, ConeSpec};
use crate::error::{argument, Error, Result};
use crate::symmetric::{binomial, sigma_on_shifted_ray, sigma_signed, SigmaJet};

/// A real number or `±∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtendedReal {
    NegInfinity,
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// Strict `self > x`.
    pub fn exceeds(self, x: f64) -> bool {
        match self {
            ExtendedReal::NegInfinity => false,
            ExtendedReal::PosInfinity => true,
            ExtendedReal::Finite(v) => v > x,
        }
    }

    /// Strict `self < x`.
    pub fn below(self, x: f64) -> bool {
        match self {
            ExtendedReal::NegInfinity => true,
            ExtendedReal::PosInfinity => false,
            ExtendedReal::Finite(v) => v < x,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::NegInfinity => f64::NEG_INFINITY,
            ExtendedReal::PosInfinity => f64::INFINITY,
            ExtendedReal::Finite(v) => v,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInfinity => f.write_str("-inf"),
            ExtendedReal::PosInfinity => f.write_str("+inf"),
            ExtendedReal::Finite(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OperatorKind {
    /// `log σ_k` on `Γ_k`.
    LogSigmaK { k: usize },
    /// `log σ_n = Σ log λ_i` on `Γ_n`.
    MongeAmpere,
    /// `-(σ_l / C(n,l)) / (σ_k / C(n,k))` on `Γ_k`, `1 ≤ l < k ≤ n`.
    HessianQuotientNeg { l: usize, k: usize },
    /// `(σ_n / σ_k)^{1/(n-k)}` on `Γ_n`, `1 ≤ k ≤ n-1`.
    InverseSigmaK { k: usize },
    /// `-t (σ_l/C(n,l))/(σ_k/C(n,k)) - (1-t)/(σ_k/C(n,k))` on `Γ_k`: the
    /// interpolation between the quotient and the Hessian equation.
    BlendedQuotient { l: usize, k: usize, t: f64 },
    /// `g(T(λ))` on `T⁻¹(cone of g)`.
    ComposedWithT(Box<OperatorKind>),
}

/// Value, gradient `(f_1..f_n)` and row-major Hessian `(f_ij)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

impl Derivatives {
    /// `𝓕 = Σ f_i`.
    pub fn trace(&self) -> f64 {
        self.grad.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricOperator {
    n: usize,
    kind: OperatorKind,
    cone: ConeSpec,
}

impl SymmetricOperator {
    pub fn new(n: usize, kind: OperatorKind) -> Result<Self> {
        let cone = cone_for(n, &kind)?;
        Ok(SymmetricOperator { n, kind, cone })
    }

    pub fn log_sigma_k(n: usize, k: usize) -> Result<Self> {
        Self::new(n, OperatorKind::LogSigmaK { k })
    }

    pub fn monge_ampere(n: usize) -> Result<Self> {
        Self::new(n, OperatorKind::MongeAmpere)
    }

    pub fn hessian_quotient(n: usize, l: usize, k: usize) -> Result<Self> {
        Self::new(n, OperatorKind::HessianQuotientNeg { l, k })
    }

    pub fn inverse_sigma_k(n: usize, k: usize) -> Result<Self> {
        Self::new(n, OperatorKind::InverseSigmaK { k })
    }

    pub fn blended_quotient(n: usize, l: usize, k: usize, t: f64) -> Result<Self> {
        Self::new(n, OperatorKind::BlendedQuotient { l, k, t })
    }

    pub fn composed_with_t(inner: SymmetricOperator) -> Result<Self> {
        Self::new(inner.n, OperatorKind::ComposedWithT(Box::new(inner.kind)))
    }

    /// Build from the config-file names `log_sigma_k`, `monge_ampere`,
    /// `hessian_quotient`, `inverse_sigma_k` and `composed_with_T` (which wraps
    /// `inner`, itself one of the other names, using the same `k`, `l`).
    pub fn from_name(
        name: &str,
        n: usize,
        k: Option<usize>,
        l: Option<usize>,
        inner: Option<&str>,
    ) -> Result<Self> {
        let need_k = || k.ok_or_else(|| argument(alloc::format!("operator '{name}' needs k")));
        match name {
            "log_sigma_k" => Self::log_sigma_k(n, need_k()?),
            "monge_ampere" => Self::monge_ampere(n),
            "hessian_quotient" => {
                let l = l.ok_or_else(|| argument("operator 'hessian_quotient' needs l"))?;
                Self::hessian_quotient(n, l, need_k()?)
            }
            "inverse_sigma_k" => Self::inverse_sigma_k(n, need_k()?),
            "composed_with_T" => {
                let inner_name = inner.unwrap_or("monge_ampere");
                if inner_name == "composed_with_T" {
                    return Err(argument("composed_with_T cannot wrap itself"));
                }
                Self::composed_with_t(Self::from_name(inner_name, n, k, l, None)?)
            }
            other => Err(argument(alloc::format!("unknown operator kind '{other}'"))),
        }
    }

    pub fn name(&self) -> String {
        kind_name(&self.kind)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    /// `sup_{∂Γ} f`.
    pub fn sup_boundary(&self) -> ExtendedReal {
        sup_boundary(&self.kind)
    }

    /// `sup_Γ f`.
    pub fn sup_interior(&self) -> ExtendedReal {
        sup_interior(&self.kind)
    }

    /// Constant `log C(n,k)` separating `log σ_k` from the log of the form ratio
    /// `χ^k ∧ α^{n-k} / α^n`; zero for the other kinds.
    pub fn form_offset(&self) -> f64 {
        form_offset(&self.kind, self.n)
    }

    pub fn eval(&self, lambda: &[f64]) -> Result<f64> {
        Ok(self.derivatives(lambda)?.value)
    }

    pub fn gradient(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        Ok(self.derivatives(lambda)?.grad)
    }

    pub fn hessian(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        Ok(self.derivatives(lambda)?.hess)
    }

    pub fn derivatives(&self, lambda: &[f64]) -> Result<Derivatives> {
        if lambda.len() != self.n {
            return Err(argument("dimension mismatch"));
        }
        self.cone.check(lambda)?;
        Ok(derivatives(&self.kind, self.n, lambda))
    }

    /// `f_∞(μ') = lim_{λ_n → ∞} f(μ', λ_n)` on the projected cone `Γ_∞`.
    pub fn f_infinity(&self, mu_prime: &[f64]) -> Result<ExtendedReal> {
        if mu_prime.len() + 1 != self.n {
            return Err(argument("f_∞ takes an (n-1)-tuple"));
        }
        if !self.cone.contains_projection(mu_prime) {
            return Err(Error::Domain("μ' is not in the projected cone Γ_∞".into()));
        }
        f_infinity(&self.kind, self.n, mu_prime)
    }
}

fn kind_name(kind: &OperatorKind) -> String {
    match kind {
        OperatorKind::LogSigmaK { k } => alloc::format!("log_sigma_k(k={k})"),
        OperatorKind::MongeAmpere => "monge_ampere".into(),
        OperatorKind::HessianQuotientNeg { l, k } => alloc::format!("hessian_quotient(l={l},k={k})"),
        OperatorKind::InverseSigmaK { k } => alloc::format!("inverse_sigma_k(k={k})"),
        OperatorKind::BlendedQuotient { l, k, t } => {
            alloc::format!("blended_quotient(l={l},k={k},t={t})")
        }
        OperatorKind::ComposedWithT(inner) => alloc::format!("composed_with_T({})", kind_name(inner)),
    }
}

fn cone_for(n: usize, kind: &OperatorKind) -> Result<ConeSpec> {
    if n == 0 {
        return Err(argument("dimension must be positive"));
    }
    match kind {
        OperatorKind::LogSigmaK { k } => ConeSpec::gamma_k(n, *k),
        OperatorKind::MongeAmpere => ConeSpec::positive(n),
        OperatorKind::HessianQuotientNeg { l, k } => {
            if !(1 <= *l && l < k && *k <= n) {
                return Err(argument(alloc::format!(
                    "hessian_quotient requires 1 ≤ l < k ≤ n, got l = {l}, k = {k}, n = {n}"
                )));
            }
            ConeSpec::gamma_k(n, *k)
        }
        OperatorKind::InverseSigmaK { k } => {
            if !(1 <= *k && *k < n) {
                return Err(argument(alloc::format!(
                    "inverse_sigma_k requires 1 ≤ k ≤ n-1, got k = {k}, n = {n}"
                )));
            }
            ConeSpec::positive(n)
        }
        OperatorKind::BlendedQuotient { l, k, t } => {
            if !(l < k && *k <= n) || !(0.0..=1.0).contains(t) {
                return Err(argument("blended quotient requires 0 ≤ l < k ≤ n and t ∈ [0,1]"));
            }
            ConeSpec::gamma_k(n, *k)
        }
        OperatorKind::ComposedWithT(inner) => {
            if matches!(**inner, OperatorKind::ComposedWithT(_)) {
                return Err(argument("nested composition with T is not supported"));
            }
            ConeSpec::preimage_under_t(cone_for(n, inner)?)
        }
    }
}

fn sup_boundary(kind: &OperatorKind) -> ExtendedReal {
    match kind {
        OperatorKind::InverseSigmaK { .. } => ExtendedReal::Finite(0.0),
        OperatorKind::ComposedWithT(inner) => sup_boundary(inner),
        _ => ExtendedReal::NegInfinity,
    }
}

fn sup_interior(kind: &OperatorKind) -> ExtendedReal {
    match kind {
        OperatorKind::HessianQuotientNeg { .. } | OperatorKind::BlendedQuotient { .. } => {
            ExtendedReal::Finite(0.0)
        }
        OperatorKind::ComposedWithT(inner) => sup_interior(inner),
        _ => ExtendedReal::PosInfinity,
    }
}

fn form_offset(kind: &OperatorKind, n: usize) -> f64 {
    match kind {
        OperatorKind::LogSigmaK { k } => binomial(n, *k).ln(),
        OperatorKind::ComposedWithT(inner) => form_offset(inner, n),
        _ => 0.0,
    }
}

/// Jet of `σ_a / σ_b`.
fn ratio(a: usize, b: usize, lambda: &[f64]) -> Derivatives {
    let n = lambda.len();
    let num = SigmaJet::new(a, lambda);
    let den = SigmaJet::new(b, lambda);
    let (av, bv) = (num.value, den.value);
    let value = av / bv;
    let grad: Vec<f64> = (0..n).map(|i| num.grad[i] / bv - av * den.grad[i] / (bv * bv)).collect();
    let mut hess = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let ij = i * n + j;
            hess[ij] = num.hess[ij] / bv
                - (num.grad[i] * den.grad[j] + num.grad[j] * den.grad[i]) / (bv * bv)
                - av * den.hess[ij] / (bv * bv)
                + 2.0 * av * den.grad[i] * den.grad[j] / (bv * bv * bv);
        }
    }
    Derivatives { value, grad, hess }
}

fn scaled(mut d: Derivatives, s: f64) -> Derivatives {
    d.value *= s;
    d.grad.iter_mut().for_each(|g| *g *= s);
    d.hess.iter_mut().for_each(|h| *h *= s);
    d
}

fn combine(a: Derivatives, wa: f64, b: Derivatives, wb: f64) -> Derivatives {
    Derivatives {
        value: wa * a.value + wb * b.value,
        grad: a.grad.iter().zip(&b.grad).map(|(x, y)| wa * x + wb * y).collect(),
        hess: a.hess.iter().zip(&b.hess).map(|(x, y)| wa * x + wb * y).collect(),
    }
}

/// Closed-form derivatives; the caller has already checked cone membership.
pub(crate) fn derivatives(kind: &OperatorKind, n: usize, lambda: &[f64]) -> Derivatives {
    match kind {
        OperatorKind::MongeAmpere => {
            let mut hess = vec![0.0; n * n];
            for (i, x) in lambda.iter().enumerate() {
                hess[i * n + i] = -1.0 / (x * x);
            }
            Derivatives {
                value: lambda.iter().map(|x| x.ln()).sum(),
                grad: lambda.iter().map(|x| 1.0 / x).collect(),
                hess,
            }
        }
        OperatorKind::LogSigmaK { k } => {
            let s = SigmaJet::new(*k, lambda);
            let v = s.value;
            let grad: Vec<f64> = s.grad.iter().map(|g| g / v).collect();
            let mut hess = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    hess[i * n + j] = s.hess[i * n + j] / v - grad[i] * grad[j];
                }
            }
            Derivatives { value: v.ln(), grad, hess }
        }
        OperatorKind::HessianQuotientNeg { l, k } => {
            scaled(ratio(*l, *k, lambda), -binomial(n, *k) / binomial(n, *l))
        }
        OperatorKind::BlendedQuotient { l, k, t } => {
            let ck = binomial(n, *k);
            let quotient = scaled(ratio(*l, *k, lambda), -ck / binomial(n, *l));
            let hessian = scaled(ratio(0, *k, lambda), -ck);
            combine(quotient, *t, hessian, 1.0 - *t)
        }
        OperatorKind::InverseSigmaK { k } => {
            let q = ratio(n, *k, lambda);
            let p = 1.0 / (n - *k) as f64;
            let qv = q.value;
            let value = qv.powf(p);
            let d1 = p * qv.powf(p - 1.0);
            let d2 = p * (p - 1.0) * qv.powf(p - 2.0);
            let grad: Vec<f64> = q.grad.iter().map(|g| d1 * g).collect();
            let mut hess = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    hess[i * n + j] = d1 * q.hess[i * n + j] + d2 * q.grad[i] * q.grad[j];
                }
            }
            Derivatives { value, grad, hess }
        }
        OperatorKind::ComposedWithT(inner) => {
            let mapped = t_map_unchecked(lambda);
            let d = derivatives(inner, n, &mapped);
            let m = (n - 1) as f64;
            let apply_t = |v: &[f64]| -> Vec<f64> {
                let s: f64 = v.iter().sum();
                v.iter().map(|x| (s - x) / m).collect()
            };
            let grad = apply_t(&d.grad);
            // T H T with T symmetric: rows then columns.
            let mut th = vec![0.0; n * n];
            for j in 0..n {
                let col: Vec<f64> = (0..n).map(|r| d.hess[r * n + j]).collect();
                for (i, v) in apply_t(&col).into_iter().enumerate() {
                    th[i * n + j] = v;
                }
            }
            let mut hess = vec![0.0; n * n];
            for i in 0..n {
                let row = &th[i * n..(i + 1) * n];
                for (j, v) in apply_t(row).into_iter().enumerate() {
                    hess[i * n + j] = v;
                }
            }
            Derivatives { value: d.value, grad, hess }
        }
    }
}

fn quotient_limit(n: usize, l: usize, k: usize, mu_prime: &[f64]) -> f64 {
    let num = sigma_signed(l as isize - 1, mu_prime) / binomial(n, l);
    let den = sigma_signed(k as isize - 1, mu_prime) / binomial(n, k);
    -num / den
}

fn f_infinity(kind: &OperatorKind, n: usize, mu_prime: &[f64]) -> Result<ExtendedReal> {
    Ok(match kind {
        OperatorKind::LogSigmaK { .. } | OperatorKind::MongeAmpere => ExtendedReal::PosInfinity,
        OperatorKind::HessianQuotientNeg { l, k } => {
            ExtendedReal::Finite(quotient_limit(n, *l, *k, mu_prime))
        }
        OperatorKind::BlendedQuotient { l, k, t } => {
            // The Hessian part -C(n,k)/σ_k tends to 0.
            let q = if *l == 0 { 0.0 } else { quotient_limit(n, *l, *k, mu_prime) };
            ExtendedReal::Finite(*t * q)
        }
        OperatorKind::InverseSigmaK { k } => {
            let ratio = sigma_signed(n as isize - 1, mu_prime) / sigma_signed(*k as isize - 1, mu_prime);
            ExtendedReal::Finite(ratio.powf(1.0 / (n - *k) as f64))
        }
        OperatorKind::ComposedWithT(inner) => composed_limit(inner, n, mu_prime)?,
    })
}

/// Along `λ = (μ', R)`, `T(λ) = (a_1 + s, …, a_{n-1} + s, b)` with `s = R/(n-1)`,
/// so each `σ_j(T(λ))` is a polynomial in `s` and the limit is read off from
/// leading terms.
fn composed_limit(inner: &OperatorKind, n: usize, mu_prime: &[f64]) -> Result<ExtendedReal> {
    let m = (n - 1) as f64;
    let total: f64 = mu_prime.iter().sum();
    let a: Vec<f64> = mu_prime.iter().map(|x| (total - x) / m).collect();
    let b = total / m;
    let poly = |j: usize| sigma_on_shifted_ray(j, &a, b);
    Ok(match inner {
        OperatorKind::LogSigmaK { k } => log_limit(&poly(*k)),
        OperatorKind::MongeAmpere => log_limit(&poly(n)),
        OperatorKind::HessianQuotientNeg { l, k } => {
            let s = -binomial(n, *k) / binomial(n, *l);
            scale_ext(ratio_limit(&poly(*l), &poly(*k)), s)
        }
        OperatorKind::InverseSigmaK { k } => {
            match ratio_limit(&poly(n), &poly(*k)) {
                ExtendedReal::Finite(v) => ExtendedReal::Finite(v.powf(1.0 / (n - *k) as f64)),
                other => other,
            }
        }
        OperatorKind::BlendedQuotient { l, k, t } => {
            let ck = binomial(n, *k);
            let q = scale_ext(ratio_limit(&poly(*l), &poly(*k)), -ck / binomial(n, *l));
            let h = scale_ext(ratio_limit(&[1.0], &poly(*k)), -ck);
            match (q, h) {
                (ExtendedReal::Finite(x), ExtendedReal::Finite(y)) => {
                    ExtendedReal::Finite(t * x + (1.0 - t) * y)
                }
                _ => return Err(Error::Numeric("unbounded blended limit".into())),
            }
        }
        OperatorKind::ComposedWithT(_) => {
            return Err(argument("nested composition with T is not supported"))
        }
    })
}

fn scale_ext(x: ExtendedReal, s: f64) -> ExtendedReal {
    match x {
        ExtendedReal::Finite(v) => ExtendedReal::Finite(v * s),
        ExtendedReal::PosInfinity if s < 0.0 => ExtendedReal::NegInfinity,
        ExtendedReal::NegInfinity if s < 0.0 => ExtendedReal::PosInfinity,
        other => other,
    }
}

fn leading(p: &[f64]) -> (usize, f64) {
    let scale = p.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    for d in (0..p.len()).rev() {
        if p[d].abs() > 1e-12 * scale {
            return (d, p[d]);
        }
    }
    (0, 0.0)
}

fn log_limit(p: &[f64]) -> ExtendedReal {
    let (d, c) = leading(p);
    if d == 0 {
        ExtendedReal::Finite(c.ln())
    } else if c > 0.0 {
        ExtendedReal::PosInfinity
    } else {
        ExtendedReal::NegInfinity
    }
}

fn ratio_limit(num: &[f64], den: &[f64]) -> ExtendedReal {
    let (dn, cn) = leading(num);
    let (dd, cd) = leading(den);
    if dn < dd {
        ExtendedReal::Finite(0.0)
    } else if dn == dd {
        ExtendedReal::Finite(cn / cd)
    } else if cn / cd > 0.0 {
        ExtendedReal::PosInfinity
    } else {
        ExtendedReal::NegInfinity
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn monge_ampere_values() {
        let op = SymmetricOperator::monge_ampere(2).unwrap();
        let d = op.derivatives(&[1.0, 2.0]).unwrap();
        assert!(close(d.value, 2.0f64.ln(), 1e-15));
        assert_eq!(d.grad, vec![1.0, 0.5]);
    }

    #[test]
    fn log_sigma_2_at_ones() {
        let op = SymmetricOperator::log_sigma_k(3, 2).unwrap();
        let d = op.derivatives(&[1.0, 1.0, 1.0]).unwrap();
        assert!(close(d.value, 3.0f64.ln(), 1e-15));
        for g in d.grad {
            assert!(close(g, 2.0 / 3.0, 1e-15));
        }
    }

    #[test]
    fn hessian_quotient_at_ones() {
        let op = SymmetricOperator::hessian_quotient(2, 1, 2).unwrap();
        let d = op.derivatives(&[1.0, 1.0]).unwrap();
        assert!(close(d.value, -1.0, 1e-15));
        assert!(close(d.grad[0], 0.5, 1e-15) && close(d.grad[1], 0.5, 1e-15));
    }

    #[test]
    fn outside_cone_reports_index() {
        let op = SymmetricOperator::log_sigma_k(3, 2).unwrap();
        match op.eval(&[1.0, 1.0, -0.5]) {
            Err(Error::OutsideCone { index, .. }) => assert_eq!(index, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(SymmetricOperator::hessian_quotient(3, 2, 2).is_err());
        assert!(SymmetricOperator::hessian_quotient(3, 0, 2).is_err());
        assert!(SymmetricOperator::inverse_sigma_k(3, 3).is_err());
        assert!(SymmetricOperator::log_sigma_k(3, 4).is_err());
        assert!(SymmetricOperator::from_name("nope", 2, None, None, None).is_err());
        let op = SymmetricOperator::from_name("composed_with_T", 3, Some(2), None, Some("log_sigma_k"))
            .unwrap();
        assert_eq!(op.name(), "composed_with_T(log_sigma_k(k=2))");
    }

    #[test]
    fn limits() {
        let q = SymmetricOperator::hessian_quotient(2, 1, 2).unwrap();
        assert_eq!(q.f_infinity(&[1.0]).unwrap(), ExtendedReal::Finite(-0.5));
        let h = SymmetricOperator::log_sigma_k(3, 2).unwrap();
        assert_eq!(h.f_infinity(&[1.0, 1.0]).unwrap(), ExtendedReal::PosInfinity);
        let ma = SymmetricOperator::monge_ampere(2).unwrap();
        assert_eq!(ma.f_infinity(&[2.0]).unwrap(), ExtendedReal::PosInfinity);
        assert!(ma.f_infinity(&[-2.0]).is_err());
    }

    #[test]
    fn composed_with_t_is_monge_ampere_swapped_in_two_dimensions() {
        let op = SymmetricOperator::composed_with_t(SymmetricOperator::monge_ampere(2).unwrap()).unwrap();
        let d = op.derivatives(&[2.0, 3.0]).unwrap();
        assert!(close(d.value, 6.0f64.ln(), 1e-15));
        assert!(close(d.grad[0], 0.5, 1e-15) && close(d.grad[1], 1.0 / 3.0, 1e-15));
    }

    #[test]
    fn composed_limit_for_inverse_sigma() {
        // inner (σ_3/σ_2)^{1} on T(μ', R): the limit is b = σ_1(μ')/2.
        let op = SymmetricOperator::composed_with_t(SymmetricOperator::inverse_sigma_k(3, 2).unwrap())
            .unwrap();
        let lim = op.f_infinity(&[1.0, 2.0]).unwrap();
        assert!(matches!(lim, ExtendedReal::Finite(v) if close(v, 1.5, 1e-12)));
    }
}
