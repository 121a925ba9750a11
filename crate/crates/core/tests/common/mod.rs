//! Independent reference implementations used as test oracles. They favour
//! obviousness over speed and share no code with the library.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::HashMap;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.sample(StandardNormal))
}

/// Solves `A·X = B` by Gauss-Jordan elimination with partial pivoting.
pub fn gauss_jordan(mut a: Vec<Vec<f64>>, mut b: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        assert!(p.abs() > 1e-300, "singular oracle system");
        for v in a[col].iter_mut() {
            *v /= p;
        }
        for v in b[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for c in 0..n {
                        a[r][c] -= f * a[col][c];
                    }
                    for c in 0..b[r].len() {
                        b[r][c] -= f * b[col][c];
                    }
                }
            }
        }
    }
    b
}

/// `W` (one row per target component) solving `(XᵀX + λL)β = Xᵀy`, where `L`
/// is the identity with its last diagonal entry zeroed.
pub fn normal_equation(x: &Array2<f64>, y: &Array2<f64>, lambda: f64) -> Array2<f64> {
    let (n, p) = x.dim();
    let m = y.ncols();
    let mut a = vec![vec![0.0; p]; p];
    let mut b = vec![vec![0.0; m]; p];
    for i in 0..p {
        for j in 0..p {
            a[i][j] = (0..n).map(|r| x[[r, i]] * x[[r, j]]).sum();
        }
        if i + 1 < p {
            a[i][i] += lambda;
        }
        for c in 0..m {
            b[i][c] = (0..n).map(|r| x[[r, i]] * y[[r, c]]).sum();
        }
    }
    let beta = gauss_jordan(a, b);
    Array2::from_shape_fn((m, p), |(i, j)| beta[j][i])
}

/// `‖X·Wᵀ − Y‖²_F` with plain loops.
pub fn sse(x: &Array2<f64>, y: &Array2<f64>, w: &Array2<f64>) -> f64 {
    let mut total = 0.0;
    for r in 0..x.nrows() {
        for c in 0..y.ncols() {
            let mut pred = 0.0;
            for j in 0..x.ncols() {
                pred += x[[r, j]] * w[[c, j]];
            }
            let e = pred - y[[r, c]];
            total += e * e;
        }
    }
    total
}

/// Optimal-string-alignment distance straight from its recursive definition,
/// memoised on suffix positions.
pub fn osa_recursive(a: &str, b: &str) -> usize {
    fn go(a: &[char], b: &[char], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == 0 {
            return j;
        }
        if j == 0 {
            return i;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let cost = usize::from(a[i - 1] != b[j - 1]);
        let mut best = (go(a, b, i - 1, j, memo) + 1)
            .min(go(a, b, i, j - 1, memo) + 1)
            .min(go(a, b, i - 1, j - 1, memo) + cost);
        if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
            best = best.min(go(a, b, i - 2, j - 2, memo) + 1);
        }
        memo.insert((i, j), best);
        best
    }
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    go(&a, &b, a.len(), b.len(), &mut HashMap::new())
}

/// Every string over `alphabet` of length at most `max_len`.
pub fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for &c in alphabet {
                let mut t = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Full cosine ranking of `words` against `query`, best first, ties by word.
pub fn brute_nearest(words: &[String], vectors: &Array2<f64>, query: &[f64], k: usize) -> Vec<(String, f64)> {
    let qn = query.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut all: Vec<(String, f64)> = words
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let row = vectors.row(i);
            let dot: f64 = row.iter().zip(query).map(|(a, b)| a * b).sum();
            let rn = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            (w.clone(), dot / (rn * qn))
        })
        .collect();
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
    eig
}

/// Sample covariance (denominator `n - 1`) of the rows of `x`.
pub fn covariance(x: &Array2<f64>) -> Vec<Vec<f64>> {
    let (n, d) = x.dim();
    let mean: Vec<f64> = (0..d)
        .map(|j| (0..n).map(|i| x[[i, j]]).sum::<f64>() / n as f64)
        .collect();
    let mut c = vec![vec![0.0; d]; d];
    for a in 0..d {
        for b in 0..d {
            c[a][b] = (0..n)
                .map(|i| (x[[i, a]] - mean[a]) * (x[[i, b]] - mean[b]))
                .sum::<f64>()
                / (n - 1) as f64;
        }
    }
    c
}

/// Mean of the given rows, accumulated one row at a time.
pub fn mean_rows(rows: &[Vec<f64>]) -> Vec<f64> {
    let d = rows[0].len();
    let mut acc = vec![0.0; d];
    for r in rows {
        for j in 0..d {
            acc[j] += r[j];
        }
    }
    acc.iter().map(|v| v / rows.len() as f64).collect()
}

/// Whether two labelings agree up to a renaming of labels.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    let mut fwd = HashMap::new();
    let mut back = HashMap::new();
    a.iter()
        .zip(b)
        .all(|(x, y)| *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x)
}
