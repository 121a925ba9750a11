use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansParams {
    pub k: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl KMeansParams {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            restarts: 10,
            max_iter: 300,
            tol: 1e-6,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.restarts == 0 || self.max_iter == 0 {
            return Err(Error::InvalidArgument(
                "k, restarts and max_iter must be positive".into(),
            ));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if n < self.k {
            return Err(Error::InvalidArgument(format!(
                "{n} points cannot form {} clusters",
                self.k
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    pub assignments: Vec<usize>,
    pub centroids: Array2<f64>,
    pub inertia: f64,
    pub iterations_run: usize,
    pub restarts_run: usize,
    pub seed: u64,
    /// Inertia after each assignment step of the winning restart, ending
    /// with the final inertia.
    pub inertia_trace: Vec<f64>,
}

/// Best of `restarts` runs of Lloyd's algorithm with k-means++ seeding.
///
/// Restart `r` draws from a ChaCha stream keyed by `(seed, r)`, so results are
/// reproducible regardless of how restarts are scheduled.
pub fn kmeans(data: ArrayView2<'_, f64>, params: &KMeansParams) -> Result<ClusterResult> {
    params.validate(data.nrows())?;
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite input to k-means".into()));
    }
    let data = data.as_standard_layout();
    let view = data.view();
    let runs: Vec<Run> = (0..params.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(r as u64);
            lloyd(view, params, &mut rng)
        })
        .collect();
    let best = runs
        .into_iter()
        .reduce(|best, run| if run.inertia < best.inertia { run } else { best })
        .expect("at least one restart");
    Ok(ClusterResult {
        assignments: best.assignments,
        centroids: best.centroids,
        inertia: best.inertia,
        iterations_run: best.iterations,
        restarts_run: params.restarts,
        seed: params.seed,
        inertia_trace: best.trace,
    })
}

struct Run {
    assignments: Vec<usize>,
    centroids: Array2<f64>,
    inertia: f64,
    iterations: usize,
    trace: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    s
}

fn row<'a>(m: &'a ArrayView2<'_, f64>, i: usize) -> &'a [f64] {
    let d = m.ncols();
    &m.as_slice().expect("standard layout")[i * d..(i + 1) * d]
}

fn kmeans_pp(data: ArrayView2<'_, f64>, k: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let n = data.nrows();
    let mut centroids = Array2::zeros((k, data.ncols()));
    let first = rng.random_range(0..n);
    centroids.row_mut(0).assign(&data.row(first));
    let mut dist: Vec<f64> = (0..n).map(|i| sq_dist(row(&data, i), row(&data, first))).collect();
    for c in 1..k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = dist.iter().rposition(|&d| d > 0.0).expect("positive total");
            for (i, &d) in dist.iter().enumerate() {
                acc += d;
                if acc > target && d > 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centroids.row_mut(c).assign(&data.row(pick));
        for (i, d) in dist.iter_mut().enumerate() {
            *d = d.min(sq_dist(row(&data, i), row(&data, pick)));
        }
    }
    centroids
}

/// Nearest centroid per point (ties to the lower index) and squared distances.
fn assign(data: ArrayView2<'_, f64>, centroids: &Array2<f64>) -> (Vec<usize>, Vec<f64>) {
    let cview = centroids.view();
    (0..data.nrows())
        .map(|i| {
            let p = row(&data, i);
            let mut best = (0, f64::INFINITY);
            for c in 0..centroids.nrows() {
                let d = sq_dist(p, row(&cview, c));
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .unzip()
}

/// Gives every empty cluster the point farthest from its current centroid,
/// taken from a cluster that can spare one.
fn repair_empty(assign: &mut [usize], dist: &mut [f64], centroids: &mut Array2<f64>, data: ArrayView2<'_, f64>) {
    let k = centroids.nrows();
    let mut sizes = vec![0usize; k];
    for &a in assign.iter() {
        sizes[a] += 1;
    }
    for c in 0..k {
        if sizes[c] > 0 {
            continue;
        }
        let far = (0..assign.len())
            .filter(|&i| sizes[assign[i]] > 1)
            .max_by(|&i, &j| dist[i].total_cmp(&dist[j]).then(j.cmp(&i)))
            .expect("n >= k guarantees a donor");
        sizes[assign[far]] -= 1;
        sizes[c] = 1;
        assign[far] = c;
        dist[far] = 0.0;
        centroids.row_mut(c).assign(&data.row(far));
    }
}

fn means(data: ArrayView2<'_, f64>, assign: &[usize], k: usize) -> Array2<f64> {
    let mut sums = Array2::<f64>::zeros((k, data.ncols()));
    let mut counts = vec![0usize; k];
    for (i, &a) in assign.iter().enumerate() {
        counts[a] += 1;
        let mut s = sums.row_mut(a);
        for (acc, v) in s.iter_mut().zip(row(&data, i)) {
            *acc += v;
        }
    }
    for (mut s, &c) in sums.rows_mut().into_iter().zip(&counts) {
        let c = c as f64;
        s.mapv_inplace(|v| v / c);
    }
    sums
}

fn lloyd(data: ArrayView2<'_, f64>, params: &KMeansParams, rng: &mut ChaCha8Rng) -> Run {
    let k = params.k;
    let mut centroids = kmeans_pp(data, k, rng);
    let mut trace = Vec::new();
    let mut iterations = 0;
    while iterations < params.max_iter {
        iterations += 1;
        let (mut assignments, mut dist) = assign(data, &centroids);
        trace.push(dist.iter().sum());
        repair_empty(&mut assignments, &mut dist, &mut centroids, data);
        let updated = means(data, &assignments, k);
        let shift = updated
            .rows()
            .into_iter()
            .zip(centroids.rows())
            .map(|(a, b)| sq_dist(a.as_slice().expect("owned"), b.as_slice().expect("owned")).sqrt())
            .fold(0.0, f64::max);
        centroids = updated;
        if shift < params.tol {
            break;
        }
    }

    // Final assignment against the converged centroids; centroids become the
    // exact means of the returned clusters.
    let (mut assignments, mut dist) = assign(data, &centroids);
    repair_empty(&mut assignments, &mut dist, &mut centroids, data);
    let centroids = means(data, &assignments, k);
    let cview = centroids.view();
    let inertia: f64 = (0..data.nrows())
        .map(|i| sq_dist(row(&data, i), row(&cview, assignments[i])))
        .sum();
    trace.push(inertia);
    Run {
        assignments,
        centroids,
        inertia,
        iterations,
        trace,
    }
}
