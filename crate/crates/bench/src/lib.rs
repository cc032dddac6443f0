//! Fixtures shared by the benchmarks.

use specsketch::{build_knn_graph, laplacian, uniform_cloud, Kernel, Laplacian, LaplacianKind};

/// Normalized Laplacian of a 10-nearest-neighbour graph over uniform points in the unit square.
pub fn sensor(n: usize, seed: u64) -> Laplacian {
    let cloud = uniform_cloud(n, 2, seed).expect("valid cloud");
    let g = build_knn_graph(&cloud, 10, Kernel::Binary, None).expect("valid knn graph");
    laplacian(&g, LaplacianKind::Normalized).expect("no isolated vertices")
}
