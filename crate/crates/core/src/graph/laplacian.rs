use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

const POWER_ITERATION_CAP: usize = 20_000;
const LAMBDA_MAX_SAFETY: f64 = 1.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaplacianKind {
    /// L = D - W
    Combinatorial,
    /// L = I - D^{-1/2} W D^{-1/2}
    Normalized,
    /// A caller-supplied symmetric PSD operator.
    Custom,
}

/// Sparse symmetric PSD operator together with an upper bound on its spectrum.
#[derive(Debug, Clone)]
pub struct Laplacian {
    kind: LaplacianKind,
    matrix: CsrMatrix,
    degrees: Vec<f64>,
    lambda_max_bound: f64,
}

/// Assembles the Laplacian of `graph`.
///
/// The normalized variant has spectrum in [0, 2] and uses 2 as its bound; the
/// combinatorial bound comes from [`estimate_lambda_max`].
pub fn laplacian(graph: &Graph, kind: LaplacianKind) -> Result<Laplacian> {
    let degrees = graph.degrees();
    let n = graph.n_vertices();
    let adjacency = graph.adjacency();
    let matrix = match kind {
        LaplacianKind::Combinatorial => {
            let rows = (0..n)
                .map(|i| {
                    let mut row: Vec<(usize, f64)> =
                        adjacency.row(i).map(|(j, w)| (j, -w)).collect();
                    row.push((i, degrees[i]));
                    row
                })
                .collect();
            CsrMatrix::from_rows(rows, |a, b| a + b)
        }
        LaplacianKind::Normalized => {
            if let Some(v) = degrees.iter().position(|&d| d <= 0.0) {
                return Err(Error::IsolatedVertex(v));
            }
            let inv_sqrt: Vec<f64> = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
            let rows = (0..n)
                .map(|i| {
                    let mut row: Vec<(usize, f64)> = adjacency
                        .row(i)
                        .map(|(j, w)| (j, -w * inv_sqrt[i] * inv_sqrt[j]))
                        .collect();
                    row.push((i, 1.0));
                    row
                })
                .collect();
            CsrMatrix::from_rows(rows, |a, b| a + b)
        }
        LaplacianKind::Custom => {
            return Err(Error::InvalidParameter(
                "custom operators are built with Laplacian::from_operator".into(),
            ))
        }
    };
    let mut lap = Laplacian {
        kind,
        matrix,
        degrees,
        lambda_max_bound: f64::NAN,
    };
    lap.lambda_max_bound = estimate_lambda_max(&lap, 1e-7);
    Ok(lap)
}

impl Laplacian {
    /// Wraps an arbitrary symmetric PSD matrix whose spectrum is known to lie in
    /// `[0, lambda_max_bound]`.
    pub fn from_operator(matrix: CsrMatrix, lambda_max_bound: f64) -> Result<Self> {
        for (i, j, v) in matrix.triplets() {
            let vt = matrix.get(j, i);
            if (v - vt).abs() > 1e-12 * v.abs().max(vt.abs()) {
                return Err(Error::InvalidParameter(format!(
                    "operator is not symmetric at ({i}, {j})"
                )));
            }
        }
        if !(lambda_max_bound > 0.0) || !lambda_max_bound.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "spectral bound must be positive and finite, got {lambda_max_bound}"
            )));
        }
        let degrees = (0..matrix.n()).map(|i| matrix.get(i, i)).collect();
        Ok(Self {
            kind: LaplacianKind::Custom,
            matrix,
            degrees,
            lambda_max_bound,
        })
    }

    /// Diagonal operator with the given eigenvalues.
    pub fn from_diagonal(eigenvalues: &[f64], lambda_max_bound: f64) -> Result<Self> {
        if let Some(v) = eigenvalues.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("negative eigenvalue {v}")));
        }
        let rows = eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &v)| vec![(i, v)])
            .collect();
        Self::from_operator(CsrMatrix::from_rows(rows, |a, b| a + b), lambda_max_bound)
    }

    pub fn kind(&self) -> LaplacianKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Certified upper bound on the largest eigenvalue.
    pub fn lambda_max_bound(&self) -> f64 {
        self.lambda_max_bound
    }

    /// Overrides the spectral bound, e.g. with a value known from elsewhere.
    pub fn with_lambda_max_bound(mut self, bound: f64) -> Self {
        self.lambda_max_bound = bound;
        self
    }

    /// `y = L x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matrix.mul_vec(x, y);
    }

    /// x^T L x.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; x.len()];
        self.apply(x, &mut y);
        x.iter().zip(&y).map(|(a, b)| a * b).sum()
    }
}

/// Upper bound on the largest eigenvalue of `lap`.
///
/// Runs power iteration from a fixed pseudo-random start until the Rayleigh quotient
/// changes by less than `tol` (relative), then inflates it by 1%. The result never
/// exceeds the Gershgorin bound, which is returned outright when iteration stalls.
/// The normalized Laplacian always gets exactly 2.
pub fn estimate_lambda_max(lap: &Laplacian, tol: f64) -> f64 {
    if lap.kind == LaplacianKind::Normalized {
        return 2.0;
    }
    let gershgorin = lap.matrix.max_abs_row_sum();
    let n = lap.n();
    if gershgorin == 0.0 {
        return 0.0;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x1a3b_5c7d);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    normalize(&mut x);
    let mut y = vec![0.0; n];
    let mut rayleigh = 0.0;
    for _ in 0..POWER_ITERATION_CAP {
        lap.apply(&x, &mut y);
        let next: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return gershgorin;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
        if (next - rayleigh).abs() <= tol * next.abs() {
            return (next * LAMBDA_MAX_SAFETY).min(gershgorin);
        }
        rayleigh = next;
    }
    log::warn!("power iteration did not converge; using the Gershgorin bound {gershgorin}");
    gershgorin
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}
