mod common;

use common::{covariance, gaussian_matrix, jacobi_eigenvalues, rng, same_partition};
use ndarray::Array2;
use proptest::prelude::*;
use rand::Rng;
use xlingmap::eval::{map_clusters_to_topics, optimal_assignment};
use xlingmap::{kmeans, pca_2d, KMeansParams};

fn blobs(seed: u64, per: usize, spread: f64) -> (Array2<f64>, Vec<usize>) {
    let centres = [[0.0, 0.0, 0.0], [6.0, 0.0, 0.0], [0.0, 6.0, 6.0]];
    let mut r = rng(seed);
    let noise = gaussian_matrix(&mut r, 3 * per, 3);
    let labels: Vec<usize> = (0..3 * per).map(|i| i / per).collect();
    let data = Array2::from_shape_fn((3 * per, 3), |(i, j)| centres[labels[i]][j] + spread * noise[[i, j]]);
    (data, labels)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

fn matched(counts: &[Vec<usize>], perm: &[usize]) -> usize {
    perm.iter().enumerate().map(|(r, &c)| counts[r][c]).sum()
}

#[test]
fn separated_blobs_are_recovered() {
    let (data, labels) = blobs(1, 100, 0.1);
    let res = kmeans(data.view(), &KMeansParams::new(3, 7)).unwrap();
    assert!(same_partition(&res.assignments, &labels));
    let gold: Vec<Option<String>> = labels.iter().map(|l| Some(format!("t{l}"))).collect();
    let report = map_clusters_to_topics(&res.assignments, 3, &gold).unwrap();
    assert_eq!(report.error_rate, 0.0);
}

#[test]
fn centroids_are_cluster_means() {
    let (data, _) = blobs(2, 40, 1.5);
    let res = kmeans(data.view(), &KMeansParams::new(4, 3)).unwrap();
    for c in 0..4 {
        let rows: Vec<Vec<f64>> = (0..data.nrows())
            .filter(|&i| res.assignments[i] == c)
            .map(|i| data.row(i).to_vec())
            .collect();
        let mean = common::mean_rows(&rows);
        for (a, b) in res.centroids.row(c).iter().zip(&mean) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
    let inertia: f64 = (0..data.nrows())
        .map(|i| {
            let c = res.centroids.row(res.assignments[i]);
            data.row(i)
                .iter()
                .zip(c.iter())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
        })
        .sum();
    assert!((inertia - res.inertia).abs() <= 1e-9 * inertia.max(1.0));
}

#[test]
fn pca_variances_are_top_eigenvalues() {
    let mut r = rng(5);
    let base = gaussian_matrix(&mut r, 200, 10);
    let scales = [5.0, 3.0, 2.0, 1.0, 1.0, 0.5, 0.5, 0.3, 0.2, 0.1];
    let data = Array2::from_shape_fn((200, 10), |(i, j)| base[[i, j]] * scales[j] + 2.0);
    let proj = pca_2d(data.view()).unwrap();
    let eig = jacobi_eigenvalues(covariance(&data));
    assert!((proj.variances[0] - eig[0]).abs() <= 1e-9 * eig[0]);
    assert!((proj.variances[1] - eig[1]).abs() <= 1e-9 * eig[0]);
    for k in 0..2 {
        let col = proj.coords.column(k);
        let mean = col.sum() / 200.0;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 199.0;
        assert!(mean.abs() <= 1e-9);
        assert!((var - proj.variances[k]).abs() <= 1e-9 * eig[0]);
    }
}

#[test]
fn pca_of_rank_one_data_is_flat() {
    let direction = [1.0, -2.0, 0.5, 3.0];
    let data = Array2::from_shape_fn((50, 4), |(i, j)| (i as f64 - 20.0) * direction[j]);
    let proj = pca_2d(data.view()).unwrap();
    assert!(proj.coords.column(1).iter().all(|v| v.abs() <= 1e-9));
}

#[test]
fn hungarian_matches_brute_force_on_random_tables() {
    let mut r = rng(13);
    for n in 1..=6 {
        for _ in 0..20 {
            let counts: Vec<Vec<usize>> = (0..n)
                .map(|_| (0..n).map(|_| r.random_range(0..50)).collect())
                .collect();
            let best = permutations(n).iter().map(|p| matched(&counts, p)).max().unwrap();
            let got = optimal_assignment(&counts);
            let mut seen = got.clone();
            seen.sort_unstable();
            assert_eq!(seen, (0..n).collect::<Vec<_>>());
            assert_eq!(matched(&counts, &got), best);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn inertia_never_increases(seed in any::<u64>(), k in 1usize..6) {
        let mut r = rng(seed);
        let data = gaussian_matrix(&mut r, 60, 4);
        let res = kmeans(data.view(), &KMeansParams { restarts: 2, ..KMeansParams::new(k, seed) }).unwrap();
        prop_assert!(res.inertia_trace.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        prop_assert_eq!(*res.inertia_trace.last().unwrap(), res.inertia);
        prop_assert!(res.assignments.iter().all(|&a| a < k));
    }

    #[test]
    fn same_seed_same_result(seed in any::<u64>()) {
        let mut r = rng(seed);
        let data = gaussian_matrix(&mut r, 80, 5);
        let params = KMeansParams::new(3, seed);
        let a = kmeans(data.view(), &params).unwrap();
        let b = kmeans(data.view(), &params).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn relabeling_clusters_changes_nothing(
        assignments in prop::collection::vec(0usize..3, 3..60),
        topics in prop::collection::vec(0usize..3, 60),
        perm in Just(vec![0usize, 1, 2]).prop_shuffle(),
    ) {
        let gold: Vec<Option<String>> = topics.iter().take(assignments.len()).map(|t| Some(format!("t{t}"))).collect();
        let relabeled: Vec<usize> = assignments.iter().map(|&a| perm[a]).collect();
        let a = map_clusters_to_topics(&assignments, 3, &gold).unwrap();
        let b = map_clusters_to_topics(&relabeled, 3, &gold).unwrap();
        prop_assert_eq!(a.matched, b.matched);
        prop_assert_eq!(a.error_rate, b.error_rate);
    }

    #[test]
    fn perfect_macro_f1_iff_no_errors(
        assignments in prop::collection::vec(0usize..3, 3..40),
        topics in prop::collection::vec(0usize..3, 40),
    ) {
        let gold: Vec<Option<String>> = topics.iter().take(assignments.len()).map(|t| Some(format!("t{t}"))).collect();
        let r = map_clusters_to_topics(&assignments, 3, &gold).unwrap();
        prop_assert_eq!(r.macro_f1 == 1.0, r.error_rate == 0.0);
        prop_assert!((r.micro_f1 - (1.0 - r.error_rate)).abs() <= 1e-15);
    }
}
