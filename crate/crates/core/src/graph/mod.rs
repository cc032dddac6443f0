//! Undirected weighted graphs, their Laplacians, and the synthetic families used for
//! testing and benchmarking.

mod generate;
mod knn;
mod laplacian;
mod load;

pub use generate::{
    complete_graph, cycle_graph, generate_sbm, generate_swissroll, path_graph, uniform_cloud,
    SbmParams,
};
pub use knn::{build_knn_graph, Kernel};
pub use laplacian::{estimate_lambda_max, laplacian, Laplacian, LaplacianKind};
pub use load::{
    load_graph, read_edge_list, read_matrix_market, write_edge_list, write_matrix_market,
    GraphFormat, LoadWarning, LoadedGraph,
};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Undirected graph with a symmetric, strictly positive, zero-diagonal weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: CsrMatrix,
    n_edges: usize,
}

impl Graph {
    /// Builds a graph from undirected edges. Each edge may be listed in either or both
    /// directions; repeated entries keep the largest weight.
    pub fn from_edges(
        n_vertices: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if n_vertices == 0 {
            return Err(Error::InvalidGraph("graph must have at least one vertex".into()));
        }
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_vertices];
        for (i, j, w) in edges {
            if i >= n_vertices || j >= n_vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for {n_vertices} vertices"
                )));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {i}")));
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight {
                    row: i,
                    col: j,
                    weight: w,
                });
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) has non-positive or non-finite weight {w}"
                )));
            }
            rows[i].push((j, w));
            rows[j].push((i, w));
        }
        let adjacency = CsrMatrix::from_rows(rows, f64::max);
        let n_edges = adjacency.nnz() / 2;
        Ok(Self { adjacency, n_edges })
    }

    pub fn n_vertices(&self) -> usize {
        self.adjacency.n()
    }

    /// Number of undirected edges |E|.
    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn adjacency(&self) -> &CsrMatrix {
        &self.adjacency
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adjacency.get(i, j)
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adjacency.row(i)
    }

    /// Weighted degrees d(i) = sum_j W_ij.
    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n_vertices())
            .map(|i| self.adjacency.row_sum(i))
            .collect()
    }

    /// Sum of the weights of all undirected edges, i.e. sum_ij W_ij / 2.
    pub fn total_weight(&self) -> f64 {
        self.degrees().iter().sum::<f64>() / 2.0
    }

    /// Undirected edges with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.triplets().filter(|&(i, j, _)| i < j)
    }

    /// Connected component id per vertex, numbered in order of first appearance.
    pub fn connected_components(&self) -> Vec<usize> {
        let n = self.n_vertices();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for (u, _) in self.adjacency.row(v) {
                    if comp[u] == usize::MAX {
                        comp[u] = next;
                        stack.push(u);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn n_components(&self) -> usize {
        self.connected_components()
            .into_iter()
            .max()
            .map_or(0, |m| m + 1)
    }

    /// Checks the structural invariants. Graphs built through [`Graph::from_edges`]
    /// always pass; this is for assertions in tests.
    pub fn validate(&self) -> Result<()> {
        for (i, j, w) in self.adjacency.triplets() {
            if i == j {
                return Err(Error::InvalidGraph(format!("nonzero diagonal at {i}")));
            }
            if !(w > 0.0) {
                return Err(Error::InvalidGraph(format!("weight {w} at ({i}, {j})")));
            }
            if self.adjacency.get(j, i) != w {
                return Err(Error::InvalidGraph(format!("asymmetric entry at ({i}, {j})")));
            }
        }
        Ok(())
    }
}

/// Points in R^p stored row-major, with optional integer classes and an optional
/// real-valued per-point parameter (for example the roll angle of a Swiss roll).
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    pub labels: Option<Vec<usize>>,
    pub parameter: Option<Vec<f64>>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("point dimension must be positive".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                what: "point coordinates",
                expected: (coords.len() / dim + 1) * dim,
                found: coords.len(),
            });
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite coordinate in point {}",
                pos / dim
            )));
        }
        Ok(Self {
            dim,
            coords,
            labels: None,
            parameter: None,
        })
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if let Some(bad) = points.iter().position(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                what: "point row",
                expected: dim,
                found: points[bad].len(),
            });
        }
        Self::new(dim, points.concat())
    }

    pub fn n_points(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_edges_symmetrizes_and_counts() {
        let g = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 2.0), (1, 0, 0.5)]).unwrap();
        assert_eq!(g.n_edges(), 2);
        assert_eq!(g.weight(0, 1), 1.0);
        assert_eq!(g.weight(2, 1), 2.0);
        assert_eq!(g.degrees(), vec![1.0, 3.0, 2.0]);
        g.validate().unwrap();
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(
            Graph::from_edges(2, [(0, 0, 1.0)]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(
            Graph::from_edges(2, [(0, 1, -1.0)]),
            Err(Error::NegativeWeight { .. })
        ));
        assert!(Graph::from_edges(2, [(0, 1, 0.0)]).is_err());
        assert!(Graph::from_edges(2, [(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn components() {
        let g = Graph::from_edges(5, [(0, 1, 1.0), (3, 4, 1.0)]).unwrap();
        assert_eq!(g.connected_components(), vec![0, 0, 1, 2, 2]);
        assert_eq!(g.n_components(), 3);
    }

    #[test]
    fn point_cloud_rejects_nan() {
        assert!(PointCloud::new(2, vec![0.0, f64::NAN]).is_err());
        assert!(PointCloud::new(2, vec![0.0, 1.0, 2.0]).is_err());
    }
}
