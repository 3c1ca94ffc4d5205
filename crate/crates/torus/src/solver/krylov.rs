//! Restarted GMRES with modified Gram-Schmidt and Givens rotations.

pub(crate) struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve `apply(x) = b` from `x = 0` until `‖b - apply(x)‖ ≤ rel_tol ‖b‖`.
/// Returns the best iterate even when the tolerance is not met.
pub(crate) fn gmres(
    mut apply: impl FnMut(&[f64]) -> Vec<f64>,
    b: &[f64],
    rel_tol: f64,
    restart: usize,
    max_iterations: usize,
) -> GmresOutcome {
    let n = b.len();
    let b_norm = norm(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return GmresOutcome { x, iterations: 0, relative_residual: 0.0 };
    }
    let mut total = 0;
    let mut r = b.to_vec();
    let mut beta = b_norm;
    while total < max_iterations {
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        // Hessenberg columns, already rotated.
        let mut h: Vec<Vec<f64>> = Vec::new();
        let mut cs: Vec<f64> = Vec::new();
        let mut sn: Vec<f64> = Vec::new();
        let mut g = vec![beta];
        let mut converged = false;
        for j in 0..restart {
            if total >= max_iterations {
                break;
            }
            total += 1;
            let mut w = apply(&basis[j]);
            let mut col = vec![0.0; j + 2];
            for (i, v) in basis.iter().enumerate() {
                col[i] = dot(&w, v);
                w.iter_mut().zip(v).for_each(|(a, b)| *a -= col[i] * b);
            }
            col[j + 1] = norm(&w);
            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let rho = col[j].hypot(col[j + 1]);
            let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (col[j] / rho, col[j + 1] / rho) };
            cs.push(c);
            sn.push(s);
            col[j] = rho;
            let next = -s * g[j];
            g[j] *= c;
            g.push(next);
            let h_next = col.pop().unwrap_or(0.0);
            h.push(col);
            let happy = h_next <= 1e-300;
            if !happy {
                basis.push(w.iter().map(|v| v / h_next).collect());
            }
            if g[j + 1].abs() <= rel_tol * b_norm || happy {
                converged = true;
                break;
            }
        }
        // Back substitution on the triangular system.
        let m = h.len();
        let mut y = vec![0.0; m];
        for i in (0..m).rev() {
            let s: f64 = ((i + 1)..m).map(|k| h[k][i] * y[k]).sum();
            y[i] = if h[i][i] != 0.0 { (g[i] - s) / h[i][i] } else { 0.0 };
        }
        for (yi, v) in y.iter().zip(&basis) {
            x.iter_mut().zip(v).for_each(|(a, b)| *a += yi * b);
        }
        let ax = apply(&x);
        r = b.iter().zip(&ax).map(|(a, b)| a - b).collect();
        beta = norm(&r);
        if converged || beta <= rel_tol * b_norm {
            break;
        }
    }
    GmresOutcome { x, iterations: total, relative_residual: beta / b_norm }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_nonsymmetric_system() {
        let a = [[4.0, 1.0, 0.0], [2.0, 5.0, 1.0], [0.0, -1.0, 3.0]];
        let b = [1.0, 2.0, 3.0];
        let out = gmres(|x| a.iter().map(|row| dot(row, x)).collect(), &b, 1e-13, 2, 50);
        let ax: Vec<f64> = a.iter().map(|row| dot(row, &out.x)).collect();
        for (p, q) in ax.iter().zip(&b) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_rhs() {
        let out = gmres(|x| x.to_vec(), &[0.0; 4], 1e-10, 5, 5);
        assert_eq!((out.x, out.iterations), (vec![0.0; 4], 0));
    }
}
