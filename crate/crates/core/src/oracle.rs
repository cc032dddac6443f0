//! Exact dense eigendecomposition, the O(N^3) reference every approximation is checked
//! against. Only usable up to a size cap.

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::graph::Laplacian;

/// Default largest N the dense oracle accepts.
pub const DEFAULT_ORACLE_CAP: usize = 2000;
/// Environment variable overriding [`DEFAULT_ORACLE_CAP`].
pub const ORACLE_CAP_ENV: &str = "SPECSKETCH_ORACLE_CAP";

/// Eigenvalue slack used when comparing against a threshold.
const COUNT_TOL: f64 = 1e-10;

/// The cap in effect: the environment override if it parses, the default otherwise.
pub fn oracle_cap() -> usize {
    std::env::var(ORACLE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ORACLE_CAP)
}

/// Ascending eigenvalues with matching orthonormal eigenvectors (as columns). May hold
/// only the leading part of the spectrum after [`ExactSpectrum::truncate`].
#[derive(Debug, Clone)]
pub struct ExactSpectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<f64>,
    complete: bool,
}

impl ExactSpectrum {
    /// Dimension N of the operator.
    pub fn n(&self) -> usize {
        self.eigenvectors.nrows()
    }

    /// Number of stored eigenpairs.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Whether every eigenpair of the operator is stored.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> MatRef<'_, f64> {
        self.eigenvectors.as_ref()
    }

    /// U_k: the eigenvectors of the k smallest eigenvalues.
    pub fn leading(&self, k: usize) -> MatRef<'_, f64> {
        self.eigenvectors.as_ref().subcols(0, k)
    }

    /// The k-th smallest eigenvalue, counting from 1.
    pub fn lambda(&self, k: usize) -> f64 {
        self.eigenvalues[k - 1]
    }

    /// A threshold strictly between the k-th and (k+1)-th eigenvalues (their midpoint),
    /// or `None` when they coincide and the k-dimensional eigenspace is not unique.
    pub fn cutoff_between(&self, k: usize) -> Option<f64> {
        let (lo, hi) = (self.eigenvalues[k - 1], *self.eigenvalues.get(k)?);
        (hi - lo > COUNT_TOL * self.scale()).then(|| 0.5 * (lo + hi))
    }

    /// Keeps the leading `r` eigenpairs and frees the rest.
    pub fn truncate(self, r: usize) -> Self {
        let r = r.min(self.len());
        Self {
            complete: self.complete && r == self.len(),
            eigenvalues: self.eigenvalues[..r].to_vec(),
            eigenvectors: self.eigenvectors.as_ref().subcols(0, r).to_owned(),
        }
    }

    fn scale(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(1.0f64, |acc, v| acc.max(v.abs()))
    }
}

/// Dense copy of the operator.
pub fn dense_matrix(lap: &Laplacian) -> Mat<f64> {
    let n = lap.n();
    let mut m = Mat::<f64>::zeros(n, n);
    for (i, j, v) in lap.matrix().triplets() {
        m[(i, j)] = v;
    }
    m
}

/// Full eigendecomposition, refusing operators larger than [`oracle_cap`].
pub fn dense_eigendecomposition(lap: &Laplacian) -> Result<ExactSpectrum> {
    dense_eigendecomposition_with_cap(lap, oracle_cap())
}

/// Full eigendecomposition with an explicit size cap.
///
/// Eigenvectors follow a fixed sign convention: the first entry with magnitude above
/// 1e-10 is positive.
pub fn dense_eigendecomposition_with_cap(lap: &Laplacian, cap: usize) -> Result<ExactSpectrum> {
    let n = lap.n();
    if n > cap {
        return Err(Error::OracleCap { n, cap });
    }
    let dense = dense_matrix(lap);
    let evd = dense
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    drop(dense);
    let eigenvalues: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    let mut eigenvectors = evd.U().to_owned();
    drop(evd);
    for j in 0..n {
        let flip = eigenvectors
            .col(j)
            .iter()
            .find(|v| v.abs() > 1e-10)
            .is_some_and(|v| *v < 0.0);
        if flip {
            for v in eigenvectors.col_mut(j).iter_mut() {
                *v = -*v;
            }
        }
    }
    Ok(ExactSpectrum {
        eigenvalues,
        eigenvectors,
        complete: true,
    })
}

/// Number of stored eigenvalues `<= lambda` (inclusive, with a 1e-10 relative slack
/// for rounding in the decomposition).
pub fn true_count(spectrum: &ExactSpectrum, lambda: f64) -> usize {
    let threshold = lambda + COUNT_TOL * spectrum.scale();
    spectrum
        .eigenvalues
        .iter()
        .take_while(|&&v| v <= threshold)
        .count()
}
