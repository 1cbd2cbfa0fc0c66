//! Thin wrappers over faer plus a Lanczos solver for the largest-magnitude
//! eigenvalues of big symmetric operators.

use faer::{Mat, MatRef, Side};

use crate::{Error, Result};

/// Full symmetric eigendecomposition, eigenvalues ascending.
pub fn sym_eigen(m: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let e = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Linalg(format!("symmetric eigendecomposition failed: {e:?}")))?;
    let s = e.S().column_vector();
    let values = (0..s.nrows()).map(|i| s[i]).collect();
    Ok((values, e.U().to_owned()))
}

/// Singular values, descending.
pub fn singular_values(m: MatRef<'_, f64>) -> Result<Vec<f64>> {
    let mut s = m
        .singular_values()
        .map_err(|e| Error::Linalg(format!("SVD failed: {e:?}")))?;
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Thin SVD `(U, s, V)` with `m = U diag(s) Vᵀ`, s descending.
pub fn svd(m: MatRef<'_, f64>) -> Result<(Mat<f64>, Vec<f64>, Mat<f64>)> {
    let d = m
        .thin_svd()
        .map_err(|e| Error::Linalg(format!("SVD failed: {e:?}")))?;
    let s = d.S().column_vector();
    let s = (0..s.nrows()).map(|i| s[i]).collect();
    Ok((d.U().to_owned(), s, d.V().to_owned()))
}

/// A symmetric linear operator available only through products.
pub trait SymOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymOperator for MatRef<'_, f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for (j, &xj) in x.iter().enumerate().take(self.ncols()) {
            let col = self.col(j);
            for (i, yi) in y.iter_mut().enumerate() {
                *yi += col[i] * xj;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Result of [`lanczos_top`].
#[derive(Debug, Clone)]
pub struct LanczosResult {
    /// The `k` Ritz values of largest magnitude, ordered by |θ| descending.
    pub values: Vec<f64>,
    /// Krylov dimension reached.
    pub steps: usize,
    /// Largest residual bound |β·s| / |θ₁| among the returned values.
    pub residual: f64,
}

/// Largest-magnitude eigenvalues of a symmetric operator by Lanczos with
/// full reorthogonalization. Stops when every one of the top `k` Ritz pairs
/// has relative residual below `tol` or after `max_dim` steps.
pub fn lanczos_top(op: &dyn SymOperator, k: usize, max_dim: usize, tol: f64) -> Result<LanczosResult> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::Contract(format!("requested {k} eigenvalues of a {n}-dimensional operator")));
    }
    let max_dim = max_dim.min(n).max(k);
    let mut q: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_7).sin()).collect();
    let norm = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|x| *x /= norm);

    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut last = LanczosResult {
        values: Vec::new(),
        steps: 0,
        residual: f64::INFINITY,
    };
    loop {
        let j = basis.len() - 1;
        op.apply(&basis[j], &mut w);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for v in &basis {
                let c = dot(&w, v);
                axpy(-c, v, &mut w);
            }
        }
        let b = dot(&w, &w).sqrt();
        let m = alpha.len();
        let check = m >= k && (m % 20 == 0 || m == max_dim || b < 1e-14);
        if check {
            last = ritz(&alpha, &beta, b, k)?;
            last.steps = m;
            if last.residual < tol || m == max_dim || b < 1e-14 {
                return Ok(last);
            }
        }
        if m == max_dim || b < 1e-14 {
            return Ok(last);
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
}

fn ritz(alpha: &[f64], beta: &[f64], b_next: f64, k: usize) -> Result<LanczosResult> {
    let m = alpha.len();
    let t = Mat::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let (theta, s) = sym_eigen(t.as_ref())?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| theta[b].abs().total_cmp(&theta[a].abs()));
    let top = theta[order[0]].abs().max(f64::MIN_POSITIVE);
    let kk = k.min(m);
    let values: Vec<f64> = order[..kk].iter().map(|&i| theta[i]).collect();
    let residual = order[..kk]
        .iter()
        .map(|&i| (b_next * s[(m - 1, i)]).abs() / top)
        .fold(0.0, f64::max);
    Ok(LanczosResult {
        values,
        steps: m,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_off_diagonal() {
        let a = 0.7;
        let m = Mat::from_fn(2, 2, |i, j| if i == j { 0.0 } else { a });
        let (v, u) = sym_eigen(m.as_ref()).unwrap();
        assert!((v[0] + a).abs() < 1e-15 && (v[1] - a).abs() < 1e-15);
        assert!((u[(0, 1)].abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn eigen_magnitudes_are_singular_values() {
        let n = 40;
        let m = Mat::from_fn(n, n, |i, j| ((i * j) as f64 * 0.1).cos() + if i == j { (i as f64) - 20.0 } else { 0.0 });
        let (v, _) = sym_eigen(m.as_ref()).unwrap();
        let mut mag: Vec<f64> = v.iter().map(|x| x.abs()).collect();
        mag.sort_by(|a, b| b.total_cmp(a));
        let s = singular_values(m.as_ref()).unwrap();
        for (a, b) in mag.iter().zip(&s) {
            assert!((a - b).abs() < 1e-10 * s[0]);
        }
    }

    #[test]
    fn svd_reconstructs() {
        let m = Mat::from_fn(7, 5, |i, j| ((i + 2 * j) as f64).sin());
        let (u, s, v) = svd(m.as_ref()).unwrap();
        for i in 0..7 {
            for j in 0..5 {
                let r: f64 = (0..5).map(|l| u[(i, l)] * s[l] * v[(j, l)]).sum();
                assert!((r - m[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lanczos_finds_dominant_values() {
        let n = 300;
        // Known spectrum: diagonal with alternating signs.
        let diag: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } * 0.97f64.powi(i as i32)).collect();
        let m = Mat::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 });
        let r = lanczos_top(&m.as_ref(), 10, 300, 1e-10).unwrap();
        for (i, v) in r.values.iter().enumerate() {
            assert!((v - diag[i]).abs() < 1e-8, "{i}: {v} vs {}", diag[i]);
        }
    }
}
