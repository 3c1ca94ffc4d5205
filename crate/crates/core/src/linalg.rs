//! Small dense complex matrices: Hermitian eigen-decomposition by cyclic Jacobi
//! rotations, Cholesky factors of metrics and whitening.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::{Float, Zero};

use crate::error::{argument, Error, Result};

/// Square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![Complex64::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(argument("matrix data has the wrong length"));
        }
        Ok(CMatrix { n, data })
    }

    pub fn from_real(n: usize, data: &[f64]) -> Result<Self> {
        Self::from_rows(n, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        m
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        CMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        CMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: f64) -> CMatrix {
        CMatrix { n: self.n, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.n;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Lower-triangular `L` with `self = L L*`; fails unless positive definite.
    pub fn cholesky(&self) -> Result<CMatrix> {
        let n = self.n;
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) {
                return Err(Error::Domain("metric is not positive definite".into()));
            }
            let djj = d.sqrt();
            l[(j, j)] = Complex64::new(djj, 0.0);
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(l)
    }

    /// Inverse of a lower-triangular matrix.
    pub fn lower_inverse(&self) -> Result<CMatrix> {
        let n = self.n;
        let mut inv = Self::zeros(n);
        for j in 0..n {
            if self[(j, j)].norm() == 0.0 {
                return Err(Error::Numeric("singular triangular factor".into()));
            }
            inv[(j, j)] = self[(j, j)].inv();
            for i in (j + 1)..n {
                let mut s = Complex64::zero();
                for k in j..i {
                    s += self[(i, k)] * inv[(k, j)];
                }
                inv[(i, j)] = -s / self[(i, i)];
            }
        }
        Ok(inv)
    }

    /// General inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<CMatrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[(x, col)].norm().total_cmp(&a[(y, col)].norm()))
                .unwrap_or(col);
            if a[(pivot, col)].norm() < 1e-300 {
                return Err(Error::Numeric("singular matrix".into()));
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[(col, col)].inv();
            for j in 0..n {
                a[(col, j)] *= p;
                inv[(col, j)] *= p;
            }
            for r in 0..n {
                if r != col {
                    let f = a[(r, col)];
                    if f.is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        let (av, iv) = (a[(col, j)], inv[(col, j)]);
                        a[(r, j)] -= f * av;
                        inv[(r, j)] -= f * iv;
                    }
                }
            }
        }
        Ok(inv)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// A matrix already checked to be Hermitian (up to the given tolerance, then
/// symmetrised exactly).
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian(CMatrix);

impl Hermitian {
    pub const DEFAULT_TOLERANCE: f64 = 1e-10;

    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, Self::DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(m: CMatrix, tol: f64) -> Result<Self> {
        if m.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("non-finite matrix entry".into()));
        }
        let deviation = m.hermitian_deviation();
        if deviation > tol * (1.0 + m.max_abs()) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::from_trusted(m))
    }

    pub fn from_real_symmetric(n: usize, data: &[f64]) -> Result<Self> {
        Self::new(CMatrix::from_real(n, data)?)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.n
    }

    /// Eigenvalues in descending order and unitary eigenvectors (columns).
    pub fn eigen(&self) -> EigenSystem {
        jacobi(self.0.clone())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().values
    }
}

/// `A = V diag(values) V*`, values descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenSystem {
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::diagonal(&self.values);
        self.vectors.mul(&d).mul(&self.vectors.adjoint())
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.n;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(mut a: CMatrix) -> EigenSystem {
    let n = a.n;
    let mut v = CMatrix::identity(n);
    let scale = a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if scale > 0.0 {
        for _sweep in 0..100 {
            if off_diagonal_norm(&a) <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q, scale);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = CMatrix::zeros(n);
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new)] = v[(r, old)];
        }
    }
    EigenSystem { values, vectors }
}

/// Annihilate `a_pq` with a unitary `G` acting on columns/rows `p, q`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, scale: f64) {
    let n = a.n;
    let apq = a[(p, q)];
    let r = apq.norm();
    if r <= 1e-300 || r <= 1e-18 * scale {
        return;
    }
    // a_pq = r e^{iφ}; with w = e^{iφ}, G = [[c, s], [-s w̄, c w̄]] in the
    // (p, q) block (rows p, q; columns p, q), chosen so (G* A G)_pq = 0.
    let w = apq / r;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -w.conj() * s;
    let g_qq = w.conj() * c;
    // A ← A G (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A ← G* A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::zero();
    a[(q, p)] = Complex64::zero();
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// A positive definite Hermitian metric with its Cholesky factor `α = L L*`.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    alpha: Hermitian,
    lower: CMatrix,
    lower_inv: CMatrix,
}

impl Metric {
    pub fn new(alpha: Hermitian) -> Result<Self> {
        let lower = alpha.matrix().cholesky()?;
        let lower_inv = lower.lower_inverse()?;
        Ok(Metric { alpha, lower, lower_inv })
    }

    pub fn identity(n: usize) -> Self {
        let id = CMatrix::identity(n);
        Metric { alpha: Hermitian(id.clone()), lower: id.clone(), lower_inv: id }
    }

    pub fn alpha(&self) -> &Hermitian {
        &self.alpha
    }

    pub fn lower(&self) -> &CMatrix {
        &self.lower
    }

    pub fn lower_inverse(&self) -> &CMatrix {
        &self.lower_inv
    }

    pub fn dim(&self) -> usize {
        self.alpha.dim()
    }

    /// `L⁻¹ A L⁻*`, whose eigenvalues are those of `α⁻¹ A`.
    pub fn whiten(&self, a: &CMatrix) -> CMatrix {
        self.lower_inv.mul(a).mul(&self.lower_inv.adjoint())
    }

    /// Eigenvalues of `α⁻¹ A`, descending.
    pub fn relative_eigenvalues(&self, a: &Hermitian) -> Vec<f64> {
        Hermitian::from_trusted(self.whiten(a.matrix())).eigenvalues()
    }

    /// `tr_α A = tr(α⁻¹ A)`.
    pub fn trace_of(&self, a: &CMatrix) -> f64 {
        self.whiten(a).trace().re
    }
}

impl Hermitian {
    /// Symmetrise without checking; for matrices Hermitian by construction
    /// such as whitened ones.
    pub fn from_trusted(mut m: CMatrix) -> Self {
        let n = m.n;
        for i in 0..n {
            m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        Hermitian(m)
    }
}
