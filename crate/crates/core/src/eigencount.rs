//! Stochastic eigenvalue counting and the two searches for the cutoff lambda_k.

use serde::{Deserialize, Serialize};

use crate::counter::OpCounter;
use crate::error::{Error, Result};
use crate::filter::{apply_filter, exact_filter, ideal_lowpass, Damping, DEFAULT_ORDER};
use crate::graph::Laplacian;
use crate::oracle::ExactSpectrum;
use crate::rng::derive_seed;
use crate::signals::{gaussian_signals, SignalMatrix};

/// Default iteration cap of the fast search.
pub const DEFAULT_MAX_ITER: usize = 10;
/// Default relative interval tolerance of the dichotomy search.
pub const DEFAULT_DICHOTOMY_EPS: f64 = 0.1;
/// Hard cap on dichotomy probes; the interval halves each time, so 64 exhausts f64.
pub const DICHOTOMY_MAX_ITER: usize = 64;

/// Smallest cutoff handed to the polynomial filter, relative to lambda_max. A
/// polynomial cannot separate eigenvalues closer than about lambda_max / m anyway.
pub const MIN_RELATIVE_CUTOFF: f64 = 1e-12;

/// Interpolation step of the fast search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    /// While no probe has landed above k, scale the lower probe by k / count (the line
    /// through the origin); afterwards the same as `Bracket`.
    Local,
    /// Always interpolate between the brackets, starting from (lambda_max, N).
    Bracket,
    /// Fit count = a lambda^p through the last two probes (p = 1 after the first one)
    /// and solve for k; falls back to the bracket step when the solution leaves the
    /// bracket.
    #[default]
    PowerLaw,
}

/// How a probe realizes the low-pass filter.
#[derive(Debug, Clone, Copy)]
pub enum FilterMode<'a> {
    /// Order-m Chebyshev approximation applied with sparse products.
    Chebyshev { order: usize, damping: Damping },
    /// The ideal indicator applied through a dense eigendecomposition.
    Exact(&'a ExactSpectrum),
}

impl Default for FilterMode<'_> {
    fn default() -> Self {
        FilterMode::Chebyshev {
            order: DEFAULT_ORDER,
            damping: Damping::Jackson,
        }
    }
}

/// Low-pass filtering of a block at `cutoff`, shared by counting and sketching.
pub(crate) fn lowpass(
    lap: &Laplacian,
    mode: FilterMode<'_>,
    cutoff: f64,
    x: &SignalMatrix,
    counter: &OpCounter,
) -> Result<SignalMatrix> {
    let lambda_max = lap.lambda_max_bound();
    match mode {
        FilterMode::Exact(spectrum) => {
            // same inclusive slack as `true_count`
            let edge = cutoff + 1e-10 * lambda_max.max(1.0);
            exact_filter(spectrum, |v| if v <= edge { 1.0 } else { 0.0 }, x, counter)
        }
        FilterMode::Chebyshev { .. } if cutoff >= lambda_max => Ok(x.clone()),
        FilterMode::Chebyshev { order, damping } => {
            let cutoff = cutoff.max(MIN_RELATIVE_CUTOFF * lambda_max);
            let filter = ideal_lowpass(cutoff, lambda_max, order, damping)?;
            apply_filter(lap, &filter, x, counter)
        }
    }
}

/// Eigenvalue counter ||g_lambda(L) R||_F^2 over a Gaussian block R with N(0, 1/d)
/// entries, so that the expected value is sum_i g_lambda(lambda_i)^2.
///
/// By default R is drawn once and reused by every probe, which makes a search
/// deterministic given the seed; [`CountProbe::fresh_signals`] redraws it per probe.
pub struct CountProbe<'a> {
    lap: &'a Laplacian,
    mode: FilterMode<'a>,
    d: usize,
    seed: u64,
    signals: SignalMatrix,
    fresh: bool,
    probes: u64,
    counter: &'a OpCounter,
}

impl<'a> CountProbe<'a> {
    pub fn new(
        lap: &'a Laplacian,
        mode: FilterMode<'a>,
        d: usize,
        seed: u64,
        counter: &'a OpCounter,
    ) -> Result<Self> {
        if let FilterMode::Exact(s) = mode {
            if s.n() != lap.n() {
                return Err(Error::DimensionMismatch {
                    what: "oracle spectrum",
                    expected: lap.n(),
                    found: s.n(),
                });
            }
        }
        Ok(Self {
            lap,
            mode,
            d,
            seed,
            signals: gaussian_signals(lap.n(), d, seed)?,
            fresh: false,
            probes: 0,
            counter,
        })
    }

    /// Draw a new R for every probe (probe t uses a seed derived from (seed, t)).
    pub fn fresh_signals(mut self, fresh: bool) -> Self {
        self.fresh = fresh;
        self
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.lap.n()
    }

    pub fn lambda_max(&self) -> f64 {
        self.lap.lambda_max_bound()
    }

    /// Number of probes made so far.
    pub fn probes(&self) -> u64 {
        self.probes
    }

    /// Estimated number of eigenvalues `<= lambda`.
    pub fn count(&mut self, lambda: f64) -> Result<f64> {
        if self.fresh && self.probes > 0 {
            self.signals =
                gaussian_signals(self.lap.n(), self.d, derive_seed(self.seed, self.probes))?;
        }
        self.probes += 1;
        let filtered = lowpass(self.lap, self.mode, lambda, &self.signals, self.counter)?;
        Ok(filtered.frobenius_norm_sq())
    }
}

/// Single count estimate with a fresh block and the Jackson-damped order-m filter.
pub fn eigencount(lap: &Laplacian, lambda: f64, d: usize, m: usize, seed: u64) -> Result<f64> {
    let counter = OpCounter::new();
    let mode = FilterMode::Chebyshev {
        order: m,
        damping: Damping::Jackson,
    };
    CountProbe::new(lap, mode, d, seed, &counter)?.count(lambda)
}

/// One probe of a search and the bracket state after it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRecord {
    pub lambda: f64,
    pub count: f64,
    pub lambda_lb: f64,
    pub lambda_ub: f64,
    pub count_lb: f64,
    pub count_ub: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaEstimate {
    pub lambda_est: f64,
    /// Count measured at `lambda_est`.
    pub count_est: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<ProbeRecord>,
}

fn rounded(c: f64) -> i64 {
    c.round() as i64
}

/// Accelerated search: interpolate the count curve locally (see [`Interpolation`]),
/// bisect when a count repeats.
///
/// Counts are real energies; convergence and the repeated-count test compare rounded
/// counts, while the interpolation uses the real values. The initial brackets (0, 0)
/// and (lambda_max, N) take part in the repeated-count test from the first probe. On
/// convergence the probed lambda whose rounded count is k is returned; otherwise the
/// probed lambda whose count is closest to k.
pub fn fast_search(
    probe: &mut CountProbe<'_>,
    k: usize,
    max_iter: usize,
    interpolation: Interpolation,
) -> Result<LambdaEstimate> {
    let n = probe.n();
    check_k(k, n)?;
    let lambda_max = probe.lambda_max();
    let (mut lb, mut ub) = (0.0, lambda_max);
    let (mut c_lb, mut c_ub) = (0.0, n as f64);
    let mut est = k as f64 * lambda_max / n as f64;
    let mut history = Vec::new();
    let mut count = 0.0;
    let mut probed_above = false;
    let mut last: Option<(f64, f64)> = None;
    let target = k as f64;

    while history.len() < max_iter {
        let probed = est;
        count = probe.count(probed)?;
        if rounded(count) == k as i64 {
            history.push(ProbeRecord {
                lambda: probed,
                count,
                lambda_lb: lb,
                lambda_ub: ub,
                count_lb: c_lb,
                count_ub: c_ub,
            });
            return Ok(LambdaEstimate {
                lambda_est: probed,
                count_est: count,
                iterations: history.len(),
                converged: true,
                history,
            });
        }
        if count < target {
            lb = probed;
        } else {
            ub = probed;
            probed_above = true;
        }
        let previous = last.replace((probed, count));
        if rounded(c_lb) == rounded(count) || rounded(c_ub) == rounded(count) {
            est = 0.5 * (lb + ub);
        } else {
            if count < target {
                c_lb = count;
            } else {
                c_ub = count;
            }
            est = lb + (target - c_lb) * (ub - lb) / (c_ub - c_lb);
            match interpolation {
                Interpolation::Local if !probed_above && c_lb > 0.0 => {
                    let scaled = lb * target / c_lb;
                    est = if scaled < ub { scaled } else { 0.5 * (lb + ub) };
                }
                Interpolation::PowerLaw if count > 0.0 => {
                    let exponent = match previous {
                        Some((lp, cp)) if cp > 0.0 && lp > 0.0 && lp != probed && cp != count => {
                            ((count / cp).ln() / (probed / lp).ln()).clamp(0.2, 5.0)
                        }
                        _ => 1.0,
                    };
                    let fitted = probed * (target / count).powf(exponent.recip());
                    if fitted > lb && fitted < ub {
                        est = fitted;
                    }
                }
                _ => {}
            }
        }
        history.push(ProbeRecord {
            lambda: probed,
            count,
            lambda_lb: lb,
            lambda_ub: ub,
            count_lb: c_lb,
            count_ub: c_ub,
        });
    }
    // Out of iterations: fall back to the probe whose count came closest to k. The
    // next interpolated step is unprobed and, past a wide eigengap, can sit at the
    // edge of the bulk.
    let (lambda_est, count_est) = history
        .iter()
        .map(|r| (r.lambda, r.count))
        .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
        .unwrap_or((est, count));
    Ok(LambdaEstimate {
        lambda_est,
        count_est,
        iterations: history.len(),
        converged: false,
        history,
    })
}

/// Bisection on [0, lambda_max] until the rounded count is k or the bracket is narrower
/// than `eps` times its midpoint.
pub fn dichotomy_search(
    probe: &mut CountProbe<'_>,
    k: usize,
    eps: f64,
    max_iter: usize,
) -> Result<LambdaEstimate> {
    check_k(k, probe.n())?;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("dichotomy eps must be positive, got {eps}")));
    }
    let (mut lb, mut ub) = (0.0, probe.lambda_max());
    let (mut c_lb, mut c_ub) = (0.0, probe.n() as f64);
    let mut history = Vec::new();
    let mut converged = false;
    let (mut lambda, mut count) = (0.5 * ub, 0.0);
    while history.len() < max_iter {
        lambda = 0.5 * (lb + ub);
        count = probe.count(lambda)?;
        converged = rounded(count) == k as i64;
        if !converged {
            if count < k as f64 {
                lb = lambda;
                c_lb = count;
            } else {
                ub = lambda;
                c_ub = count;
            }
        }
        history.push(ProbeRecord {
            lambda,
            count,
            lambda_lb: lb,
            lambda_ub: ub,
            count_lb: c_lb,
            count_ub: c_ub,
        });
        if converged || ub - lb < eps * 0.5 * (lb + ub) {
            break;
        }
    }
    Ok(LambdaEstimate {
        lambda_est: lambda,
        count_est: count,
        iterations: history.len(),
        converged,
        history,
    })
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= N = {n}, got k = {k}")));
    }
    Ok(())
}

/// Fast search with a shared Gaussian block of width d and the order-m Jackson filter.
pub fn estimate_lambda_k_fast(
    lap: &Laplacian,
    k: usize,
    d: usize,
    m: usize,
    max_iter: usize,
    seed: u64,
) -> Result<LambdaEstimate> {
    let counter = OpCounter::new();
    let mode = FilterMode::Chebyshev {
        order: m,
        damping: Damping::Jackson,
    };
    fast_search(
        &mut CountProbe::new(lap, mode, d, seed, &counter)?,
        k,
        max_iter,
        Interpolation::default(),
    )
}

/// Dichotomy search with a shared Gaussian block of width d and the order-m Jackson
/// filter.
pub fn estimate_lambda_k_dichotomy(
    lap: &Laplacian,
    k: usize,
    d: usize,
    m: usize,
    eps: f64,
    seed: u64,
) -> Result<LambdaEstimate> {
    let counter = OpCounter::new();
    let mode = FilterMode::Chebyshev {
        order: m,
        damping: Damping::Jackson,
    };
    let mut probe = CountProbe::new(lap, mode, d, seed, &counter)?;
    dichotomy_search(&mut probe, k, eps, DICHOTOMY_MAX_ITER)
}
