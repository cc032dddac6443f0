//! Lloyd's k-means with k-means++ seeding and independent restarts.

use faer::MatRef;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::Partition;
use crate::rng::{derive_seed, rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KMeansOptions {
    pub max_iter: usize,
    pub restarts: usize,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self {
            max_iter: 300,
            restarts: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KMeansResult {
    pub partition: Partition,
    /// k x dim, row-major.
    pub centroids: Vec<f64>,
    pub wcss: f64,
    /// Within-cluster sum of squares after each assignment step of the winning restart.
    pub wcss_history: Vec<f64>,
    pub iterations: usize,
    pub restart: usize,
}

/// Clusters the rows of `rows`. Restart r is seeded from (seed, r); the restart with
/// the lowest final WCSS wins, ties going to the lower index.
pub fn kmeans(rows: MatRef<'_, f64>, k: usize, seed: u64, opts: KMeansOptions) -> Result<KMeansResult> {
    let (n, dim) = (rows.nrows(), rows.ncols());
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= N = {n}, got k = {k}")));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidParameter("need at least one restart".into()));
    }
    let mut points = vec![0.0; n * dim];
    for i in 0..n {
        for j in 0..dim {
            points[i * dim + j] = rows[(i, j)];
        }
    }
    let runs: Vec<KMeansResult> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| lloyd(&points, n, dim, k, derive_seed(seed, r as u64), opts.max_iter, r))
        .collect();
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.wcss < runs[best].wcss {
            best = i;
        }
    }
    Ok(runs.into_iter().nth(best).expect("at least one restart"))
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus(points: &[f64], n: usize, dim: usize, k: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed);
    let mut centroids = Vec::with_capacity(k * dim);
    let first = rng.random_range(0..n);
    centroids.extend_from_slice(&points[first * dim..(first + 1) * dim]);
    let mut dist: Vec<f64> = (0..n)
        .map(|i| sq_dist(&points[i * dim..(i + 1) * dim], &centroids[..dim]))
        .collect();
    for _ in 1..k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in dist.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = &points[pick * dim..(pick + 1) * dim];
        centroids.extend_from_slice(c);
        for (i, d) in dist.iter_mut().enumerate() {
            *d = d.min(sq_dist(&points[i * dim..(i + 1) * dim], c));
        }
    }
    centroids
}

fn lloyd(
    points: &[f64],
    n: usize,
    dim: usize,
    k: usize,
    seed: u64,
    max_iter: usize,
    restart: usize,
) -> KMeansResult {
    let mut centroids = plus_plus(points, n, dim, k, seed);
    let mut labels = vec![usize::MAX; n];
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let mut changed = false;
        let mut wcss = 0.0;
        for i in 0..n {
            let p = &points[i * dim..(i + 1) * dim];
            let (mut best, mut best_d) = (0, f64::INFINITY);
            for c in 0..k {
                let d = sq_dist(p, &centroids[c * dim..(c + 1) * dim]);
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            changed |= labels[i] != best;
            labels[i] = best;
            wcss += best_d;
        }
        history.push(wcss);
        if !changed || iterations == max_iter {
            break;
        }
        iterations += 1;
        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            let c = labels[i];
            counts[c] += 1;
            for j in 0..dim {
                sums[c * dim + j] += points[i * dim + j];
            }
        }
        for c in 0..k {
            // empty clusters keep their previous centroid
            if counts[c] > 0 {
                for j in 0..dim {
                    centroids[c * dim + j] = sums[c * dim + j] / counts[c] as f64;
                }
            }
        }
    }
    KMeansResult {
        partition: Partition::new(labels, k).expect("labels below k"),
        centroids,
        wcss: *history.last().expect("one assignment"),
        wcss_history: history,
        iterations,
        restart,
    }
}
