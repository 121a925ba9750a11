//! Dense square solvers for the normal equations.
//!
//! Matrices are row-major `Vec<f64>`. Loops run in a fixed order so results
//! are bit-reproducible.

use crate::error::{Error, Result};

/// Solves `a · x = b` for a symmetric positive (semi-)definite `a` (n × n)
/// and `m` right-hand sides stored row-major in `b` (n × m).
///
/// Tries Cholesky first and falls back to LU with partial pivoting. Pivots
/// below `n · eps · max|a_ij|` count as singular.
pub(crate) fn solve_spd(a: &[f64], n: usize, b: &[f64], m: usize) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n * m);
    let scale = a.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()));
    let tol = n as f64 * f64::EPSILON * scale;
    if scale == 0.0 {
        return Err(Error::SingularMatrix);
    }
    match cholesky(a, n, tol) {
        Some(l) => Ok(cholesky_solve(&l, n, b, m)),
        None => lu_solve(a, n, b, m, tol).ok_or(Error::SingularMatrix),
    }
}

/// Lower-triangular factor `l` with `a = l · lᵀ`, or `None` on a tiny pivot.
fn cholesky(a: &[f64], n: usize, tol: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let row_j = j * n;
        let mut diag = a[row_j + j];
        for k in 0..j {
            diag -= l[row_j + k] * l[row_j + k];
        }
        if diag <= tol || !diag.is_finite() {
            return None;
        }
        let d = diag.sqrt();
        l[row_j + j] = d;
        for i in j + 1..n {
            let row_i = i * n;
            let mut s = a[row_i + j];
            for k in 0..j {
                s -= l[row_i + k] * l[row_j + k];
            }
            l[row_i + j] = s / d;
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[f64], n: usize, b: &[f64], m: usize) -> Vec<f64> {
    // forward: l · z = b
    let mut z = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let lik = l[i * n + k];
            if lik != 0.0 {
                for c in 0..m {
                    z[i * m + c] -= lik * z[k * m + c];
                }
            }
        }
        let d = l[i * n + i];
        for c in 0..m {
            z[i * m + c] /= d;
        }
    }
    // backward: lᵀ · x = z
    for i in (0..n).rev() {
        for k in i + 1..n {
            let lki = l[k * n + i];
            if lki != 0.0 {
                for c in 0..m {
                    z[i * m + c] -= lki * z[k * m + c];
                }
            }
        }
        let d = l[i * n + i];
        for c in 0..m {
            z[i * m + c] /= d;
        }
    }
    z
}

fn lu_solve(a: &[f64], n: usize, b: &[f64], m: usize, tol: f64) -> Option<Vec<f64>> {
    let mut lu = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| lu[r * n + col].abs().total_cmp(&lu[s * n + col].abs()).then(s.cmp(&r)))
            .expect("non-empty range");
        let p = lu[pivot * n + col];
        if p.abs() <= tol || !p.is_finite() {
            return None;
        }
        if pivot != col {
            for c in 0..n {
                lu.swap(col * n + c, pivot * n + c);
            }
            for c in 0..m {
                x.swap(col * m + c, pivot * m + c);
            }
        }
        for r in col + 1..n {
            let f = lu[r * n + col] / p;
            if f == 0.0 {
                continue;
            }
            lu[r * n + col] = 0.0;
            for c in col + 1..n {
                lu[r * n + c] -= f * lu[col * n + c];
            }
            for c in 0..m {
                x[r * m + c] -= f * x[col * m + c];
            }
        }
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            let u = lu[i * n + k];
            if u != 0.0 {
                for c in 0..m {
                    x[i * m + c] -= u * x[k * m + c];
                }
            }
        }
        let d = lu[i * n + i];
        for c in 0..m {
            x[i * m + c] /= d;
        }
    }
    Some(x)
}
