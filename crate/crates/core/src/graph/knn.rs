use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Graph, PointCloud};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    /// Unit weight on every kept edge.
    #[default]
    Binary,
    /// exp(-dist^2 / sigma^2).
    Gaussian,
}

/// Exact k-nearest-neighbour graph, symmetrized by union: `i ~ j` when either point
/// selects the other. Ties in distance are broken by the lower index.
///
/// With the Gaussian kernel `sigma` defaults to the mean distance to the k-th
/// neighbour. Coincident points are allowed and receive weight 1.
pub fn build_knn_graph(
    cloud: &PointCloud,
    k_nn: usize,
    kernel: Kernel,
    sigma: Option<f64>,
) -> Result<Graph> {
    let n = cloud.n_points();
    if k_nn == 0 || k_nn >= n {
        return Err(Error::InvalidParameter(format!(
            "k_nn = {k_nn} must be in [1, N) with N = {n}"
        )));
    }
    if let Some(s) = sigma {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {s}")));
        }
    }

    // (neighbor, squared distance) per point, nearest first.
    let neighborhoods: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| nearest(cloud, i, k_nn))
        .collect();

    let sigma = match (kernel, sigma) {
        (Kernel::Binary, _) => 1.0,
        (Kernel::Gaussian, Some(s)) => s,
        (Kernel::Gaussian, None) => {
            neighborhoods
                .iter()
                .map(|nb| nb[k_nn - 1].1.sqrt())
                .sum::<f64>()
                / n as f64
        }
    };

    let weight = |d2: f64| match kernel {
        Kernel::Binary => 1.0,
        Kernel::Gaussian if sigma == 0.0 => 1.0,
        Kernel::Gaussian => (-d2 / (sigma * sigma)).exp().max(f64::MIN_POSITIVE),
    };

    let edges = neighborhoods
        .iter()
        .enumerate()
        .flat_map(|(i, nb)| nb.iter().map(move |&(j, d2)| (i, j, d2)))
        .map(|(i, j, d2)| (i, j, weight(d2)));
    Graph::from_edges(n, edges)
}

fn nearest(cloud: &PointCloud, i: usize, k: usize) -> Vec<(usize, f64)> {
    let p = cloud.point(i);
    let mut cand: Vec<(usize, f64)> = (0..cloud.n_points())
        .filter(|&j| j != i)
        .map(|j| {
            let d2 = p
                .iter()
                .zip(cloud.point(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
            (j, d2)
        })
        .collect();
    let by_dist = |a: &(usize, f64), b: &(usize, f64)| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0));
    if cand.len() > k {
        cand.select_nth_unstable_by(k - 1, by_dist);
        cand.truncate(k);
    }
    cand.sort_by(by_dist);
    cand
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> PointCloud {
        PointCloud::new(1, xs.to_vec()).unwrap()
    }

    #[test]
    fn two_points_single_edge() {
        let g = build_knn_graph(&line(&[0.0, 5.0]), 1, Kernel::Binary, None).unwrap();
        assert_eq!(g.n_edges(), 1);
        assert_eq!(g.weight(0, 1), 1.0);
    }

    #[test]
    fn collinear_points_brute_force() {
        let xs = [0.0, 1.0, 3.0];
        let g = build_knn_graph(&line(&xs), 1, Kernel::Binary, None).unwrap();
        // brute force: nearest neighbour of each point, union of the selections
        let mut expected = std::collections::BTreeSet::new();
        for i in 0..3 {
            let j = (0..3)
                .filter(|&j| j != i)
                .min_by(|&a, &b| (xs[a] - xs[i]).abs().total_cmp(&(xs[b] - xs[i]).abs()))
                .unwrap();
            expected.insert((i.min(j), i.max(j)));
        }
        let got: std::collections::BTreeSet<_> = g.edges().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(got, expected);
        assert_eq!(got, [(0, 1), (1, 2)].into_iter().collect());
    }

    #[test]
    fn duplicate_points_get_unit_weight() {
        let g = build_knn_graph(&line(&[0.0, 0.0, 0.0]), 1, Kernel::Gaussian, None).unwrap();
        for (_, _, w) in g.edges() {
            assert_eq!(w, 1.0);
        }
    }

    #[test]
    fn gaussian_weights_and_default_sigma() {
        let g = build_knn_graph(&line(&[0.0, 1.0, 3.0]), 1, Kernel::Gaussian, None).unwrap();
        // kth-neighbour distances are 1, 1, 2
        let sigma: f64 = 4.0 / 3.0;
        assert!((g.weight(0, 1) - (-1.0 / (sigma * sigma)).exp()).abs() < 1e-15);
        assert!((g.weight(1, 2) - (-4.0 / (sigma * sigma)).exp()).abs() < 1e-15);
    }

    #[test]
    fn k_too_large() {
        assert!(build_knn_graph(&line(&[0.0, 1.0]), 2, Kernel::Binary, None).is_err());
    }
}
