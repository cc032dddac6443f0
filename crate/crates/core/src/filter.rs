//! Chebyshev polynomial approximations of spectral filters and their application to
//! signal blocks through the three-term recurrence on the rescaled Laplacian.

use std::f64::consts::PI;

use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counter::OpCounter;
use crate::error::{Error, Result};
use crate::graph::Laplacian;
use crate::oracle::ExactSpectrum;
use crate::signals::SignalMatrix;

/// Default polynomial order.
pub const DEFAULT_ORDER: usize = 500;

/// Quadrature nodes per coefficient. The indicator is discontinuous, so the quadrature
/// effectively moves the cutoff to the nearest node; more nodes shrink that shift.
const NODES_PER_COEFF: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Damping {
    None,
    #[default]
    Jackson,
}

/// p(lambda) = sum_j c_j T_j(t) with t = (2 lambda - lambda_max) / lambda_max.
///
/// `coeffs` already include any damping and the halved constant term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyFilter {
    coeffs: Vec<f64>,
    lambda_max: f64,
    cutoff: Option<f64>,
    damping: Damping,
}

impl PolyFilter {
    /// Filter from raw coefficients in the shifted Chebyshev basis.
    pub fn from_chebyshev_coeffs(coeffs: Vec<f64>, lambda_max: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("filter needs at least one coefficient".into()));
        }
        if !(lambda_max > 0.0 && lambda_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda_max must be positive and finite, got {lambda_max}"
            )));
        }
        Ok(Self {
            coeffs,
            lambda_max,
            cutoff: None,
            damping: Damping::None,
        })
    }

    /// Polynomial order m.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn cutoff(&self) -> Option<f64> {
        self.cutoff
    }

    pub fn damping(&self) -> Damping {
        self.damping
    }

    /// Scalar evaluation by Clenshaw's recurrence.
    pub fn eval(&self, lambda: f64) -> f64 {
        let t = 2.0 * lambda / self.lambda_max - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs[1..].iter().rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coeffs[0]
    }
}

/// Chebyshev coefficients of `f` on [-1, 1] up to order `m`, by Gauss-Chebyshev
/// quadrature with `nodes` points (at least m + 1).
pub fn chebyshev_coefficients(f: impl Fn(f64) -> f64, m: usize, nodes: usize) -> Vec<f64> {
    let q = nodes.max(m + 1);
    let mut coeffs = vec![0.0; m + 1];
    for i in 0..q {
        let theta = PI * (i as f64 + 0.5) / q as f64;
        let x = theta.cos();
        let v = f(x);
        if v == 0.0 {
            continue;
        }
        // cos(j theta) = T_j(x) by the three-term recurrence
        let (mut t_prev, mut t_cur) = (1.0, x);
        coeffs[0] += v;
        for c in coeffs.iter_mut().skip(1) {
            *c += v * t_cur;
            let t_next = 2.0 * x * t_cur - t_prev;
            t_prev = t_cur;
            t_cur = t_next;
        }
    }
    let scale = 2.0 / q as f64;
    coeffs[0] *= 0.5 * scale;
    for c in coeffs.iter_mut().skip(1) {
        *c *= scale;
    }
    coeffs
}

/// Jackson damping factors g_0..g_m for order m.
pub fn jackson_coefficients(m: usize) -> Vec<f64> {
    let m2 = (m + 2) as f64;
    let alpha = PI / m2;
    (0..=m)
        .map(|j| {
            let j = j as f64;
            ((1.0 - j / m2) * alpha.sin() * (j * alpha).cos()
                + alpha.cos() * (j * alpha).sin() / m2)
                / alpha.sin()
        })
        .collect()
}

/// Order-m approximation of the ideal low-pass filter 1[lambda <= cutoff] on
/// [0, lambda_max].
pub fn ideal_lowpass(cutoff: f64, lambda_max: f64, m: usize, damping: Damping) -> Result<PolyFilter> {
    if !(cutoff > 0.0 && cutoff < lambda_max) {
        return Err(Error::CutoffOutOfRange { cutoff, lambda_max });
    }
    if m == 0 {
        return Err(Error::InvalidParameter("filter order must be at least 1".into()));
    }
    let a = 2.0 * cutoff / lambda_max - 1.0;
    let mut coeffs = chebyshev_coefficients(
        |t| if t <= a { 1.0 } else { 0.0 },
        m,
        NODES_PER_COEFF * (m + 1),
    );
    if damping == Damping::Jackson {
        for (c, g) in coeffs.iter_mut().zip(jackson_coefficients(m)) {
            *c *= g;
        }
    }
    Ok(PolyFilter {
        coeffs,
        lambda_max,
        cutoff: Some(cutoff),
        damping,
    })
}

/// p(L) X by the Chebyshev recurrence: exactly m sparse products of L with the block.
///
/// The block is processed in row-major layout so each sparse row touches contiguous
/// signal rows; every output entry is computed in a fixed order, so the result does not
/// depend on the thread count.
pub fn apply_filter(
    lap: &Laplacian,
    filter: &PolyFilter,
    x: &SignalMatrix,
    counter: &OpCounter,
) -> Result<SignalMatrix> {
    let (n, d) = (x.nrows(), x.ncols());
    if n != lap.n() {
        return Err(Error::DimensionMismatch {
            what: "signal rows",
            expected: lap.n(),
            found: n,
        });
    }
    let m = filter.order();
    let c = filter.coeffs();
    let scale = 2.0 / filter.lambda_max();

    let mut t_prev = to_row_major(x);
    let mut y: Vec<f64> = t_prev.iter().map(|v| c[0] * v).collect();
    if m >= 1 {
        let mut t_cur = vec![0.0; n * d];
        shifted_product(lap, scale, d, &t_prev, &mut t_cur, None);
        axpy(&mut y, c[1], &t_cur);
        let mut t_next = vec![0.0; n * d];
        for &cj in &c[2..] {
            shifted_product(lap, scale, d, &t_cur, &mut t_next, Some(&t_prev));
            axpy(&mut y, cj, &t_next);
            std::mem::swap(&mut t_prev, &mut t_cur);
            std::mem::swap(&mut t_cur, &mut t_next);
        }
    }
    counter.add_block_products(m as u64, d as u64);
    SignalMatrix::from_column_major(n, d, from_row_major(&y, n, d))
}

/// out = L~ x (prev = None) or out = 2 L~ x - prev, with L~ = scale L - I.
fn shifted_product(
    lap: &Laplacian,
    scale: f64,
    d: usize,
    x: &[f64],
    out: &mut [f64],
    prev: Option<&[f64]>,
) {
    let a = lap.matrix();
    let factor = if prev.is_some() { 2.0 } else { 1.0 };
    out.par_chunks_mut(d)
        .enumerate()
        .with_min_len(64)
        .for_each(|(i, row)| {
            row.fill(0.0);
            for (j, w) in a.row(i) {
                let xj = &x[j * d..(j + 1) * d];
                for (r, v) in row.iter_mut().zip(xj) {
                    *r += w * v;
                }
            }
            let xi = &x[i * d..(i + 1) * d];
            match prev {
                Some(p) => {
                    let pi = &p[i * d..(i + 1) * d];
                    for ((r, v), q) in row.iter_mut().zip(xi).zip(pi) {
                        *r = factor * (scale * *r - v) - q;
                    }
                }
                None => {
                    for (r, v) in row.iter_mut().zip(xi) {
                        *r = scale * *r - v;
                    }
                }
            }
        });
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn to_row_major(x: &SignalMatrix) -> Vec<f64> {
    let (n, d) = (x.nrows(), x.ncols());
    let mut out = vec![0.0; n * d];
    for j in 0..d {
        for (i, v) in x.col(j).iter().enumerate() {
            out[i * d + j] = *v;
        }
    }
    out
}

fn from_row_major(y: &[f64], n: usize, d: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * d];
    for i in 0..n {
        for j in 0..d {
            out[j * n + i] = y[i * d + j];
        }
    }
    out
}

/// U g(Lambda) U^T X by dense products over the stored eigenpairs. On a truncated
/// spectrum the dropped eigenpairs contribute nothing, which is exact when g vanishes
/// on them.
pub fn exact_filter(
    spectrum: &ExactSpectrum,
    g: impl Fn(f64) -> f64,
    x: &SignalMatrix,
    counter: &OpCounter,
) -> Result<SignalMatrix> {
    if x.nrows() != spectrum.n() {
        return Err(Error::DimensionMismatch {
            what: "signal rows",
            expected: spectrum.n(),
            found: x.nrows(),
        });
    }
    let u = spectrum.eigenvectors();
    let mut coeffs: Mat<f64> = u.transpose() * x.as_faer();
    for (i, &lambda) in spectrum.eigenvalues().iter().enumerate() {
        let gi = g(lambda);
        for j in 0..coeffs.ncols() {
            coeffs[(i, j)] *= gi;
        }
    }
    let out = u * &coeffs;
    counter.add_dense_filter();
    Ok(SignalMatrix::from_faer(out.as_ref()))
}

/// The ideal low-pass 1[lambda <= cutoff] as a closure, for use with [`exact_filter`].
pub fn indicator(cutoff: f64) -> impl Fn(f64) -> f64 {
    move |lambda| if lambda <= cutoff { 1.0 } else { 0.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, laplacian, LaplacianKind};
    use crate::oracle::dense_eigendecomposition;
    use crate::signals::gaussian_signals;

    /// Closed-form Chebyshev coefficients of 1[t <= a].
    fn step_coeffs(a: f64, m: usize) -> Vec<f64> {
        let th = a.acos();
        (0..=m)
            .map(|j| {
                if j == 0 {
                    (PI - th) / PI
                } else {
                    -2.0 * (j as f64 * th).sin() / (j as f64 * PI)
                }
            })
            .collect()
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let (cutoff, lmax, m) = (0.7, 2.0, 60);
        let f = ideal_lowpass(cutoff, lmax, m, Damping::None).unwrap();
        let exact = step_coeffs(2.0 * cutoff / lmax - 1.0, m);
        // the cutoff moves by at most half a node spacing in angle
        let tol = 2.0 * PI / (NODES_PER_COEFF * (m + 1)) as f64;
        for (a, b) in f.coeffs().iter().zip(&exact) {
            assert!((a - b).abs() < tol, "{a} vs {b}");
        }
    }

    #[test]
    fn smooth_function_coefficients() {
        // T_3 has coefficient vector e_3
        let c = chebyshev_coefficients(|t| 4.0 * t * t * t - 3.0 * t, 5, 12);
        for (j, v) in c.iter().enumerate() {
            let want = if j == 3 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-13);
        }
    }

    #[test]
    fn jackson_endpoints() {
        let g = jackson_coefficients(10);
        assert!((g[0] - 1.0).abs() < 1e-14);
        assert!(g.windows(2).all(|w| w[1] <= w[0] + 1e-14));
        assert!(g[10] > 0.0 && g[10] < 0.1);
    }

    #[test]
    fn clenshaw_matches_direct_sum() {
        let f = PolyFilter::from_chebyshev_coeffs(vec![0.3, -0.2, 0.5, 0.1], 4.0).unwrap();
        for &lambda in &[0.0, 0.7, 2.0, 3.9] {
            let t: f64 = lambda / 2.0 - 1.0;
            let direct = 0.3 - 0.2 * t + 0.5 * (2.0 * t * t - 1.0) + 0.1 * (4.0 * t.powi(3) - 3.0 * t);
            assert!((f.eval(lambda) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn cutoff_out_of_range() {
        assert!(matches!(
            ideal_lowpass(2.0, 2.0, 10, Damping::Jackson),
            Err(Error::CutoffOutOfRange { .. })
        ));
        assert!(ideal_lowpass(0.0, 2.0, 10, Damping::Jackson).is_err());
    }

    #[test]
    fn constant_filter_is_identity_and_counts_nothing() {
        let l = laplacian(&cycle_graph(12), LaplacianKind::Combinatorial).unwrap();
        let x = gaussian_signals(12, 3, 1).unwrap();
        let f = PolyFilter::from_chebyshev_coeffs(vec![1.0], l.lambda_max_bound()).unwrap();
        let counter = OpCounter::new();
        let y = apply_filter(&l, &f, &x, &counter).unwrap();
        assert_eq!(y.as_slice(), x.as_slice());
        assert_eq!(counter.snapshot().block_products, 0);
    }

    #[test]
    fn recurrence_matches_dense_polynomial() {
        let l = laplacian(&cycle_graph(10), LaplacianKind::Normalized).unwrap();
        let f = ideal_lowpass(0.6, 2.0, 40, Damping::Jackson).unwrap();
        let x = gaussian_signals(10, 2, 5).unwrap();
        let counter = OpCounter::new();
        let y = apply_filter(&l, &f, &x, &counter).unwrap();
        let s = dense_eigendecomposition(&l).unwrap();
        let z = exact_filter(&s, |v| f.eval(v), &x, &counter).unwrap();
        for (a, b) in y.as_slice().iter().zip(z.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
        let c = counter.snapshot();
        assert_eq!((c.block_products, c.matvecs, c.dense_filters), (40, 80, 1));
    }

    #[test]
    fn dimension_mismatch() {
        let l = laplacian(&cycle_graph(5), LaplacianKind::Combinatorial).unwrap();
        let f = PolyFilter::from_chebyshev_coeffs(vec![1.0], 4.0).unwrap();
        let x = gaussian_signals(6, 1, 0).unwrap();
        assert!(apply_filter(&l, &f, &x, &OpCounter::new()).is_err());
    }
}
