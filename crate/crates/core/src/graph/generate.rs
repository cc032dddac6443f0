use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, PointCloud};
use crate::error::{Error, Result};
use crate::rng::rng;

/// Stochastic block model parameterized by average degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbmParams {
    pub n: usize,
    pub classes: usize,
    /// Ratio q / p of inter- to intra-class edge probability.
    pub eps: f64,
    /// Target expected degree s.
    pub avg_degree: f64,
    pub seed: u64,
}

impl SbmParams {
    /// Intra- and inter-class edge probabilities (p, q) solving
    /// s = (N/k - 1) p + (N - N/k) q with q = eps p.
    pub fn probabilities(&self) -> Result<(f64, f64)> {
        if self.n < 2 || self.classes == 0 || self.classes > self.n {
            return Err(Error::InvalidParameter(format!(
                "need 2 <= N and 1 <= classes <= N, got N = {}, classes = {}",
                self.n, self.classes
            )));
        }
        if !(0.0..=1.0).contains(&self.eps) {
            return Err(Error::InvalidParameter(format!(
                "eps must be in [0, 1], got {}",
                self.eps
            )));
        }
        if !(self.avg_degree > 0.0) {
            return Err(Error::InvalidParameter("average degree must be positive".into()));
        }
        let n = self.n as f64;
        let block = n / self.classes as f64;
        let p = self.avg_degree / ((block - 1.0) + (n - block) * self.eps);
        if !(p <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "average degree {} needs intra-class probability {p} > 1",
                self.avg_degree
            )));
        }
        Ok((p, self.eps * p))
    }
}

/// Samples an SBM graph and its ground-truth classes. Classes are drawn uniformly at
/// random per vertex; edges are sampled block by block with geometric skipping, so the
/// cost is linear in N + |E|. Bit-reproducible for fixed parameters.
pub fn generate_sbm(params: &SbmParams) -> Result<(Graph, Vec<usize>)> {
    let (p, q) = params.probabilities()?;
    let mut rng = rng(params.seed);
    let labels: Vec<usize> = (0..params.n)
        .map(|_| rng.random_range(0..params.classes))
        .collect();
    let mut members = vec![Vec::new(); params.classes];
    for (v, &c) in labels.iter().enumerate() {
        members[c].push(v);
    }

    let mut edges = Vec::new();
    for a in 0..params.classes {
        for b in a..params.classes {
            let prob = if a == b { p } else { q };
            let (ma, mb) = (&members[a], &members[b]);
            let total = if a == b {
                (ma.len() as u64) * (ma.len() as u64).saturating_sub(1) / 2
            } else {
                ma.len() as u64 * mb.len() as u64
            };
            let mut row = 1u64;
            for t in bernoulli_indices(&mut rng, total, prob) {
                if a == b {
                    // t = r (r - 1) / 2 + c with c < r
                    while t >= row * (row + 1) / 2 {
                        row += 1;
                    }
                    let c = t - row * (row - 1) / 2;
                    edges.push((ma[row as usize], ma[c as usize], 1.0));
                } else {
                    let nb = mb.len() as u64;
                    edges.push((ma[(t / nb) as usize], mb[(t % nb) as usize], 1.0));
                }
            }
        }
    }
    Ok((Graph::from_edges(params.n, edges)?, labels))
}

/// Indices in `0..total` kept independently with probability `prob`, in increasing order.
fn bernoulli_indices(rng: &mut impl Rng, total: u64, prob: f64) -> Vec<u64> {
    let mut out = Vec::new();
    if prob <= 0.0 || total == 0 {
        return out;
    }
    if prob >= 1.0 {
        return (0..total).collect();
    }
    let log_q = (1.0 - prob).ln();
    let mut next: u64 = 0;
    loop {
        let u: f64 = rng.random();
        let skip = ((1.0 - u).ln() / log_q).floor();
        if skip >= (total - next) as f64 {
            break;
        }
        next += skip as u64;
        out.push(next);
        next += 1;
        if next >= total {
            break;
        }
    }
    out
}

/// Swiss roll: theta uniform in [a pi, b pi], (x, y, z) = (theta cos theta, U[0,1],
/// theta sin theta). The angle is kept as the per-point parameter.
pub fn generate_swissroll(n: usize, a: f64, b: f64, seed: u64) -> Result<PointCloud> {
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("need a < b, got a = {a}, b = {b}")));
    }
    let mut rng = rng(seed);
    let mut coords = Vec::with_capacity(3 * n);
    let mut thetas = Vec::with_capacity(n);
    for _ in 0..n {
        let theta = std::f64::consts::PI * (a + (b - a) * rng.random::<f64>());
        let y: f64 = rng.random();
        coords.extend_from_slice(&[theta * theta.cos(), y, theta * theta.sin()]);
        thetas.push(theta);
    }
    let mut cloud = PointCloud::new(3, coords)?;
    cloud.parameter = Some(thetas);
    Ok(cloud)
}

/// N points uniform in the unit hypercube of dimension `dim`; with `dim = 2` and a knn
/// graph on top this is the usual random sensor network.
pub fn uniform_cloud(n: usize, dim: usize, seed: u64) -> Result<PointCloud> {
    let mut rng = rng(seed);
    let coords = (0..n * dim).map(|_| rng.random::<f64>()).collect();
    PointCloud::new(dim, coords)
}

pub fn cycle_graph(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).expect("valid cycle")
}

pub fn path_graph(n: usize) -> Graph {
    assert!(n >= 2, "path needs at least 2 vertices");
    Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1, 1.0))).expect("valid path")
}

pub fn complete_graph(n: usize) -> Graph {
    assert!(n >= 2, "complete graph needs at least 2 vertices");
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0)));
    Graph::from_edges(n, edges).expect("valid complete graph")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sbm(n: usize, classes: usize, eps: f64, s: f64, seed: u64) -> (Graph, Vec<usize>) {
        generate_sbm(&SbmParams {
            n,
            classes,
            eps,
            avg_degree: s,
            seed,
        })
        .unwrap()
    }

    #[test]
    fn eps_zero_is_block_diagonal() {
        let (g, labels) = sbm(400, 4, 0.0, 10.0, 1);
        assert!(g.n_edges() > 0);
        for (i, j, _) in g.edges() {
            assert_eq!(labels[i], labels[j]);
        }
    }

    #[test]
    fn mean_degree_near_target() {
        let (g, _) = sbm(1000, 20, 0.1, 16.0, 11);
        let mean = 2.0 * g.n_edges() as f64 / 1000.0;
        assert!((mean - 16.0).abs() < 1.6, "mean degree {mean}");
    }

    #[test]
    fn sbm_is_reproducible() {
        assert_eq!(sbm(300, 3, 0.3, 6.0, 5), sbm(300, 3, 0.3, 6.0, 5));
        assert_ne!(sbm(300, 3, 0.3, 6.0, 5).0, sbm(300, 3, 0.3, 6.0, 6).0);
    }

    #[test]
    fn impossible_degree_rejected() {
        let r = generate_sbm(&SbmParams {
            n: 20,
            classes: 4,
            eps: 0.0,
            avg_degree: 10.0,
            seed: 0,
        });
        assert!(r.is_err());
    }

    #[test]
    fn bernoulli_indices_hits_expected_rate() {
        let mut r = rng(9);
        let idx = bernoulli_indices(&mut r, 200_000, 0.01);
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
        assert!((idx.len() as f64 - 2000.0).abs() < 5.0 * 2000f64.sqrt());
        assert_eq!(bernoulli_indices(&mut r, 10, 1.0).len(), 10);
        assert!(bernoulli_indices(&mut r, 10, 0.0).is_empty());
    }

    #[test]
    fn swissroll_identity() {
        let cloud = generate_swissroll(500, 1.0, 4.0, 2).unwrap();
        let theta = cloud.parameter.as_ref().unwrap();
        for i in 0..cloud.n_points() {
            let p = cloud.point(i);
            assert!((p[0] * p[0] + p[2] * p[2] - theta[i] * theta[i]).abs() < 1e-10);
            assert!((0.0..=1.0).contains(&p[1]));
            assert!(theta[i] >= std::f64::consts::PI && theta[i] <= 4.0 * std::f64::consts::PI);
        }
    }

    #[test]
    fn swissroll_at_zero_angle() {
        // a = b would be rejected; a tiny interval around 0 pins theta to ~0
        let cloud = generate_swissroll(3, 0.0, 1e-300, 4).unwrap();
        for i in 0..3 {
            let p = cloud.point(i);
            assert!(p[0].abs() < 1e-290 && p[2].abs() < 1e-290);
        }
        assert!(generate_swissroll(3, 2.0, 1.0, 0).is_err());
    }
}
