//! Quality measures for approximate eigenspaces and partitions.

use std::collections::HashMap;

use faer::MatRef;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Hard assignment of N items to `k` clusters. Empty clusters are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::InvalidParameter(format!("label {bad} out of range for k = {k}")));
        }
        Ok(Self { labels, k })
    }

    /// Partition with k = 1 + the largest label.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        Self { labels, k }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn empty_clusters(&self) -> usize {
        self.sizes().iter().filter(|&&s| s == 0).count()
    }
}

/// (1/k) ||B^T U_k||_F^2: the fraction of span(U_k) captured by the orthonormal B.
pub fn mean_energy(b: MatRef<'_, f64>, u_k: MatRef<'_, f64>) -> Result<f64> {
    if b.nrows() != u_k.nrows() {
        return Err(Error::DimensionMismatch {
            what: "basis rows",
            expected: u_k.nrows(),
            found: b.nrows(),
        });
    }
    if u_k.ncols() == 0 {
        return Err(Error::InvalidParameter("reference basis has no columns".into()));
    }
    let p = b.transpose() * u_k;
    let energy = p.norm_l2();
    Ok(energy * energy / u_k.ncols() as f64)
}

fn pairs(n: u64) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

/// Adjusted Rand index from the contingency table. Two partitions that both put
/// everything in one cluster (or both isolate every item) score 1.
pub fn adjusted_rand(a: &Partition, b: &Partition) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "partition length",
            expected: a.len(),
            found: b.len(),
        });
    }
    let mut table: HashMap<(usize, usize), u64> = HashMap::new();
    for (&x, &y) in a.labels.iter().zip(&b.labels) {
        *table.entry((x, y)).or_default() += 1;
    }
    let index: f64 = table.values().map(|&c| pairs(c)).sum();
    let sum_a: f64 = a.sizes().iter().map(|&c| pairs(c as u64)).sum();
    let sum_b: f64 = b.sizes().iter().map(|&c| pairs(c as u64)).sum();
    let expected = sum_a * sum_b / pairs(a.len() as u64).max(1.0);
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

/// Newman modularity sum_c [e_c / m - (deg_c / 2m)^2] with m the total edge weight
/// and e_c the weight of edges inside cluster c.
pub fn modularity(graph: &Graph, partition: &Partition) -> Result<f64> {
    if partition.len() != graph.n_vertices() {
        return Err(Error::DimensionMismatch {
            what: "partition length",
            expected: graph.n_vertices(),
            found: partition.len(),
        });
    }
    let total = graph.total_weight();
    if !(total > 0.0) {
        return Err(Error::InvalidGraph("modularity is undefined without edges".into()));
    }
    let labels = partition.labels();
    let mut intra = vec![0.0; partition.k()];
    let mut degree = vec![0.0; partition.k()];
    for (i, j, w) in graph.edges() {
        if labels[i] == labels[j] {
            intra[labels[i]] += w;
        }
        degree[labels[i]] += w;
        degree[labels[j]] += w;
    }
    Ok(intra
        .iter()
        .zip(&degree)
        .map(|(e, d)| e / total - (d / (2.0 * total)).powi(2))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete_graph;
    use faer::Mat;

    #[test]
    fn identical_bases_have_unit_energy() {
        let u = Mat::<f64>::identity(6, 3);
        assert!((mean_energy(u.as_ref(), u.as_ref()).unwrap() - 1.0).abs() < 1e-15);
        let other = Mat::<f64>::from_fn(6, 3, |i, j| if i == j + 3 { 1.0 } else { 0.0 });
        assert_eq!(mean_energy(other.as_ref(), u.as_ref()).unwrap(), 0.0);
        assert!(mean_energy(Mat::<f64>::identity(5, 3).as_ref(), u.as_ref()).is_err());
    }

    #[test]
    fn ari_relabel_invariant() {
        let a = Partition::from_labels(vec![0, 0, 1, 1, 2, 2]);
        let b = Partition::from_labels(vec![2, 2, 0, 0, 1, 1]);
        assert!((adjusted_rand(&a, &b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ari_trivial_partitions() {
        let a = Partition::from_labels(vec![0; 5]);
        assert_eq!(adjusted_rand(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn modularity_single_cluster_is_zero() {
        let g = complete_graph(5);
        let p = Partition::from_labels(vec![0; 5]);
        assert!(modularity(&g, &p).unwrap().abs() < 1e-15);
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![0, 3], 3).is_err());
        let p = Partition::new(vec![0, 2, 2], 4).unwrap();
        assert_eq!(p.sizes(), vec![1, 0, 2, 0]);
        assert_eq!(p.empty_clusters(), 2);
    }
}
