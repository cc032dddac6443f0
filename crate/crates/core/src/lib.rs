//! Approximation of the leading eigenvectors of a graph Laplacian from polynomially
//! filtered Gaussian random signals.
//!
//! The pipeline draws an N x d Gaussian block R, finds a cutoff lambda_k with a
//! stochastic eigenvalue count, applies a Jackson-damped Chebyshev low-pass g to get
//! M = g(L) R, and returns the top-k left singular vectors of M. A dense oracle and
//! quality metrics are included for checking results at moderate N.
//!
//! ```
//! use specsketch::{approximate_eigenspace, cycle_graph, laplacian, EigenspaceOptions, LaplacianKind};
//!
//! let lap = laplacian(&cycle_graph(200), LaplacianKind::Normalized).unwrap();
//! let mut opts = EigenspaceOptions::new(4);
//! opts.order = 100;
//! opts.seed = 1;
//! let approx = approximate_eigenspace(&lap, &opts, None).unwrap();
//! assert_eq!(approx.basis.ncols(), 4);
//! ```

pub mod counter;
pub mod eigencount;
pub mod eigenspace;
pub mod error;
pub mod filter;
pub mod graph;
pub mod io;
pub mod kmeans;
pub mod metrics;
pub mod oracle;
pub mod rng;
pub mod signals;
pub mod sparse;

pub use counter::{OpCounter, OpCounts};
pub use eigencount::{
    dichotomy_search, eigencount, estimate_lambda_k_dichotomy, estimate_lambda_k_fast,
    fast_search, CountProbe, FilterMode, Interpolation, LambdaEstimate, ProbeRecord,
};
pub use eigenspace::{
    approximate_eigenspace, gaussian_projection_stats, orthonormality_error, raw_sketch,
    Diagnostics, EigenspaceApprox, EigenspaceOptions, LambdaDiagnostics, LambdaMode,
    Orthonormalization, ProjectionStats, Sketch, StageTimings,
};
pub use error::{Error, Result};
pub use filter::{
    apply_filter, chebyshev_coefficients, exact_filter, ideal_lowpass, indicator,
    jackson_coefficients, Damping, PolyFilter,
};
pub use graph::*;
pub use kmeans::{kmeans, KMeansOptions, KMeansResult};
pub use metrics::{adjusted_rand, mean_energy, modularity, Partition};
pub use oracle::{dense_eigendecomposition, dense_eigendecomposition_with_cap, true_count, ExactSpectrum};
pub use signals::{gaussian_signals, SignalMatrix};
pub use sparse::CsrMatrix;
