//! Eigenspace approximation: filter a Gaussian block with the low-pass at lambda_k and
//! orthonormalize the result.

use std::time::Instant;

use faer::{Mat, MatRef};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counter::{OpCounter, OpCounts};
use crate::eigencount::{
    dichotomy_search, fast_search, lowpass, CountProbe, FilterMode, Interpolation, ProbeRecord,
    DEFAULT_DICHOTOMY_EPS, DEFAULT_MAX_ITER, DICHOTOMY_MAX_ITER,
};
use crate::error::{Error, Result};
use crate::filter::{Damping, DEFAULT_ORDER};
use crate::graph::Laplacian;
use crate::oracle::ExactSpectrum;
use crate::rng::derive_seed;
use crate::signals::{gaussian_signals, SignalMatrix};

/// Singular values below this fraction of the largest mark the sketch rank deficient.
pub const RANK_TOL: f64 = 1e-13;

const SIGNAL_STREAM: u64 = 1;
const PROBE_STREAM: u64 = 2;

/// Where the filter cutoff comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum LambdaMode {
    Fast {
        max_iter: usize,
        #[serde(default)]
        interpolation: Interpolation,
    },
    Dichotomy { eps: f64 },
    /// The k-th smallest eigenvalue of the oracle spectrum.
    Oracle,
    Fixed { lambda: f64 },
}

impl Default for LambdaMode {
    fn default() -> Self {
        LambdaMode::Fast {
            max_iter: DEFAULT_MAX_ITER,
            interpolation: Interpolation::default(),
        }
    }
}

impl LambdaMode {
    pub fn dichotomy() -> Self {
        LambdaMode::Dichotomy {
            eps: DEFAULT_DICHOTOMY_EPS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orthonormalization {
    #[default]
    Svd,
    Qr,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenspaceOptions {
    pub k: usize,
    /// Number of random signals; defaults to k.
    pub d: Option<usize>,
    pub order: usize,
    pub damping: Damping,
    pub seed: u64,
    pub lambda: LambdaMode,
    /// Filter with the ideal indicator through the oracle instead of a polynomial.
    pub exact_filter: bool,
    pub orthonormalization: Orthonormalization,
}

impl EigenspaceOptions {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            d: None,
            order: DEFAULT_ORDER,
            damping: Damping::Jackson,
            seed: 0,
            lambda: LambdaMode::default(),
            exact_filter: false,
            orthonormalization: Orthonormalization::Svd,
        }
    }

    pub fn signals(&self) -> usize {
        self.d.unwrap_or(self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaDiagnostics {
    pub mode: LambdaMode,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<ProbeRecord>,
    /// Width of the probing block.
    pub d_probe: usize,
    pub ops: OpCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub order: usize,
    pub exact_filter: bool,
    pub seed: u64,
    pub signal_seed: u64,
    pub probe_seed: u64,
    pub lambda: LambdaDiagnostics,
    /// Cost of the filtering stage alone.
    pub filter_ops: OpCounts,
    /// Cost of the orthonormalization stage alone.
    pub svd_ops: OpCounts,
    pub total_ops: OpCounts,
}

/// Wall-clock seconds per stage. Kept apart from [`Diagnostics`], which is
/// deterministic given the seed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub lambda: f64,
    pub filter: f64,
    pub orthonormalization: f64,
}

/// The filtered block M = g(L) R before orthonormalization.
#[derive(Debug, Clone)]
pub struct Sketch {
    pub signals: SignalMatrix,
    pub lambda_k_used: f64,
    pub diagnostics: Diagnostics,
    pub timings: StageTimings,
}

#[derive(Debug, Clone)]
pub struct EigenspaceApprox {
    /// N x k with orthonormal columns.
    pub basis: Mat<f64>,
    /// Leading k singular values of the sketch, non-increasing. Empty under QR.
    pub singular_values: Vec<f64>,
    pub lambda_k_used: f64,
    pub diagnostics: Diagnostics,
    pub timings: StageTimings,
}

fn validate(lap: &Laplacian, opts: &EigenspaceOptions, oracle: Option<&ExactSpectrum>) -> Result<()> {
    let n = lap.n();
    let d = opts.signals();
    if opts.k == 0 || opts.k > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= N = {n}, got k = {}",
            opts.k
        )));
    }
    if d < opts.k {
        return Err(Error::InvalidParameter(format!("need d >= k, got d = {d} < k = {}", opts.k)));
    }
    if opts.k == n && !opts.exact_filter {
        return Err(Error::InvalidParameter("k = N is only supported with the exact filter".into()));
    }
    if !opts.exact_filter && opts.order == 0 {
        return Err(Error::InvalidParameter("filter order must be at least 1".into()));
    }
    let needs_oracle = opts.exact_filter || opts.lambda == LambdaMode::Oracle;
    match oracle {
        None if needs_oracle => Err(Error::InvalidParameter(
            "exact filtering and oracle lambda_k need an oracle spectrum".into(),
        )),
        Some(s) if s.n() != n => Err(Error::DimensionMismatch {
            what: "oracle spectrum",
            expected: n,
            found: s.n(),
        }),
        Some(s) if opts.lambda == LambdaMode::Oracle && s.len() < opts.k => {
            Err(Error::InvalidParameter(format!(
                "oracle holds {} eigenpairs, k = {}",
                s.len(),
                opts.k
            )))
        }
        _ => Ok(()),
    }
}

/// Runs the pipeline up to the filtered block M = g(L) R.
pub fn raw_sketch(
    lap: &Laplacian,
    opts: &EigenspaceOptions,
    oracle: Option<&ExactSpectrum>,
) -> Result<Sketch> {
    validate(lap, opts, oracle)?;
    let (n, k, d) = (lap.n(), opts.k, opts.signals());
    let signal_seed = derive_seed(opts.seed, SIGNAL_STREAM);
    let probe_seed = derive_seed(opts.seed, PROBE_STREAM);
    let mode = match (opts.exact_filter, oracle) {
        (true, Some(s)) => FilterMode::Exact(s),
        _ => FilterMode::Chebyshev {
            order: opts.order,
            damping: opts.damping,
        },
    };

    let probe_counter = OpCounter::new();
    let started = Instant::now();
    let (lambda_k, lambda) = match opts.lambda {
        LambdaMode::Fixed { lambda } => (lambda, idle_lambda(opts.lambda)),
        LambdaMode::Oracle => (
            oracle.expect("validated").lambda(k),
            idle_lambda(opts.lambda),
        ),
        LambdaMode::Fast {
            max_iter,
            interpolation,
        } => {
            let mut probe = CountProbe::new(lap, mode, k, probe_seed, &probe_counter)?;
            let est = fast_search(&mut probe, k, max_iter, interpolation)?;
            if !est.converged {
                log::warn!(
                    "lambda_k search did not converge in {} probes; using {}",
                    est.iterations,
                    est.lambda_est
                );
            }
            (est.lambda_est, searched(opts.lambda, est, k, &probe_counter))
        }
        LambdaMode::Dichotomy { eps } => {
            let mut probe = CountProbe::new(lap, mode, k, probe_seed, &probe_counter)?;
            let est = dichotomy_search(&mut probe, k, eps, DICHOTOMY_MAX_ITER)?;
            if !est.converged {
                log::warn!("dichotomy stopped without the exact count; using {}", est.lambda_est);
            }
            (est.lambda_est, searched(opts.lambda, est, k, &probe_counter))
        }
    };

    let lambda_seconds = started.elapsed().as_secs_f64();

    let filter_counter = OpCounter::new();
    let started = Instant::now();
    let r = gaussian_signals(n, d, signal_seed)?;
    let m = lowpass(lap, mode, lambda_k, &r, &filter_counter)?;
    let filter_ops = filter_counter.snapshot();
    let timings = StageTimings {
        lambda: lambda_seconds,
        filter: started.elapsed().as_secs_f64(),
        orthonormalization: 0.0,
    };
    Ok(Sketch {
        signals: m,
        lambda_k_used: lambda_k,
        diagnostics: Diagnostics {
            n,
            k,
            d,
            order: if opts.exact_filter { 0 } else { opts.order },
            exact_filter: opts.exact_filter,
            seed: opts.seed,
            signal_seed,
            probe_seed,
            total_ops: add(lambda.ops, filter_ops),
            lambda,
            filter_ops,
            svd_ops: OpCounts::default(),
        },
        timings,
    })
}

fn idle_lambda(mode: LambdaMode) -> LambdaDiagnostics {
    LambdaDiagnostics {
        mode,
        iterations: 0,
        converged: true,
        history: Vec::new(),
        d_probe: 0,
        ops: OpCounts::default(),
    }
}

fn searched(
    mode: LambdaMode,
    est: crate::eigencount::LambdaEstimate,
    d_probe: usize,
    counter: &OpCounter,
) -> LambdaDiagnostics {
    LambdaDiagnostics {
        mode,
        iterations: est.iterations,
        converged: est.converged,
        history: est.history,
        d_probe,
        ops: counter.snapshot(),
    }
}

fn add(a: OpCounts, b: OpCounts) -> OpCounts {
    OpCounts {
        block_products: a.block_products + b.block_products,
        matvecs: a.matvecs + b.matvecs,
        svd_calls: a.svd_calls + b.svd_calls,
        svd_cubic: a.svd_cubic + b.svd_cubic,
        dense_filters: a.dense_filters + b.dense_filters,
    }
}

/// Approximates span(U_k): sketch M = g(L) R, then the top-k left singular vectors of M
/// (or the thin Q factor under [`Orthonormalization::Qr`]).
pub fn approximate_eigenspace(
    lap: &Laplacian,
    opts: &EigenspaceOptions,
    oracle: Option<&ExactSpectrum>,
) -> Result<EigenspaceApprox> {
    let sketch = raw_sketch(lap, opts, oracle)?;
    let k = opts.k;
    let m = sketch.signals.as_faer();
    let svd_counter = OpCounter::new();
    let started = Instant::now();
    svd_counter.add_svd(m.ncols() as u64);
    let (basis, singular_values) = match opts.orthonormalization {
        Orthonormalization::Svd => {
            let svd = m
                .thin_svd()
                .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
            let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
            let (smax, sk) = (s[0], s[k - 1]);
            if !(sk > RANK_TOL * smax) {
                return Err(Error::RankDeficient {
                    smallest: sk,
                    largest: smax,
                });
            }
            (svd.U().subcols(0, k).to_owned(), s[..k].to_vec())
        }
        Orthonormalization::Qr => {
            let qr = m.qr();
            let r = qr.thin_R();
            let diag: Vec<f64> = (0..r.ncols().min(r.nrows())).map(|i| r[(i, i)].abs()).collect();
            let rmax = diag.iter().copied().fold(0.0, f64::max);
            let rmin = diag[..k].iter().copied().fold(f64::INFINITY, f64::min);
            if !(rmin > RANK_TOL * rmax) {
                return Err(Error::RankDeficient {
                    smallest: rmin,
                    largest: rmax,
                });
            }
            (qr.compute_thin_Q().subcols(0, k).to_owned(), Vec::new())
        }
    };
    let mut timings = sketch.timings;
    timings.orthonormalization = started.elapsed().as_secs_f64();
    let mut diagnostics = sketch.diagnostics;
    diagnostics.svd_ops = svd_counter.snapshot();
    diagnostics.total_ops = add(diagnostics.total_ops, diagnostics.svd_ops);
    Ok(EigenspaceApprox {
        basis,
        singular_values,
        lambda_k_used: sketch.lambda_k_used,
        diagnostics,
        timings,
    })
}

/// Largest entrywise deviation of B^T B from the identity.
pub fn orthonormality_error(b: MatRef<'_, f64>) -> f64 {
    let gram = b.transpose() * b;
    let mut worst = 0.0f64;
    for j in 0..gram.ncols() {
        for i in 0..gram.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

/// Empirical moments of the projection U^T R of Gaussian blocks onto orthonormal
/// columns, with z-scores against mean 0, variance 1/d and zero covariance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionStats {
    pub trials: usize,
    pub variance_target: f64,
    /// Mean of all entries pooled over trials.
    pub mean: f64,
    pub mean_se: f64,
    /// Mean square of all entries pooled over trials.
    pub variance: f64,
    pub variance_se: f64,
    /// Covariance across trials of entries (0,0) and (1,0).
    pub cov_rows: f64,
    /// Covariance across trials of entries (0,0) and (0,1).
    pub cov_cols: f64,
    pub cov_se: f64,
    /// Pass threshold in standard errors.
    pub z_limit: f64,
}

impl ProjectionStats {
    pub fn mean_ok(&self) -> bool {
        self.mean.abs() < self.z_limit * self.mean_se
    }

    pub fn variance_ok(&self) -> bool {
        (self.variance - self.variance_target).abs() < self.z_limit * self.variance_se
    }

    pub fn covariance_ok(&self) -> bool {
        self.cov_rows.abs() < self.z_limit * self.cov_se
            && self.cov_cols.abs() < self.z_limit * self.cov_se
    }

    pub fn passed(&self) -> bool {
        self.mean_ok() && self.variance_ok() && self.covariance_ok()
    }
}

/// Projects `trials` Gaussian N x d blocks (entries N(0, 1/d)) onto the columns of `u`
/// and collects pooled moments. The covariances need at least two columns in each of
/// `u` and the block; with fewer, they are reported as 0.
pub fn gaussian_projection_stats(
    u: MatRef<'_, f64>,
    d: usize,
    trials: usize,
    seed: u64,
) -> Result<ProjectionStats> {
    let deviation = orthonormality_error(u);
    if deviation > 1e-10 {
        return Err(Error::NotOrthonormal { deviation });
    }
    if trials < 2 {
        return Err(Error::InvalidParameter("need at least 2 trials".into()));
    }
    let (n, r) = (u.nrows(), u.ncols());
    let sums = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<[f64; 4]> {
            let block = gaussian_signals(n, d, derive_seed(seed, t as u64))?;
            let p = u.transpose() * block.as_faer();
            let (mut s1, mut s2) = (0.0, 0.0);
            for j in 0..d {
                for v in p.col(j).iter() {
                    s1 += v;
                    s2 += v * v;
                }
            }
            let c_rows = if r > 1 { p[(0, 0)] * p[(1, 0)] } else { 0.0 };
            let c_cols = if d > 1 { p[(0, 0)] * p[(0, 1)] } else { 0.0 };
            Ok([s1, s2, c_rows, c_cols])
        })
        .collect::<Result<Vec<_>>>()?;
    let total = [0, 1, 2, 3].map(|i| sums.iter().map(|s| s[i]).sum::<f64>());
    let entries = (trials * r * d) as f64;
    let sigma2 = 1.0 / d as f64;
    Ok(ProjectionStats {
        trials,
        variance_target: sigma2,
        mean: total[0] / entries,
        mean_se: (sigma2 / entries).sqrt(),
        variance: total[1] / entries,
        variance_se: sigma2 * (2.0 / entries).sqrt(),
        cov_rows: total[2] / trials as f64,
        cov_cols: total[3] / trials as f64,
        cov_se: sigma2 / (trials as f64).sqrt(),
        z_limit: 4.0,
    })
}
