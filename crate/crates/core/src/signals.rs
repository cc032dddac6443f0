//! Dense column-major blocks of graph signals.

use faer::{Mat, MatRef};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// N x d block of real signals stored column-major, one signal per column.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
    seed: Option<u64>,
}

impl SignalMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
            seed: None,
        }
    }

    pub fn from_column_major(nrows: usize, ncols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::DimensionMismatch {
                what: "signal data",
                expected: nrows * ncols,
                found: data.len(),
            });
        }
        Ok(Self {
            nrows,
            ncols,
            data,
            seed: None,
        })
    }

    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let nrows = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != nrows) {
            return Err(Error::DimensionMismatch {
                what: "signal column",
                expected: nrows,
                found: bad.len(),
            });
        }
        let ncols = columns.len();
        Self::from_column_major(nrows, ncols, columns.concat())
    }

    pub fn from_faer(m: MatRef<'_, f64>) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for j in 0..m.ncols() {
            data.extend(m.col(j).iter().copied());
        }
        Self {
            nrows: m.nrows(),
            ncols: m.ncols(),
            data,
            seed: None,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Seed the block was drawn from, when it is a fresh Gaussian block.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact panics on 0; an N = 0 block has no meaningful columns anyway
        self.data.chunks_exact(self.nrows.max(1))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.nrows + i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_faer(&self) -> MatRef<'_, f64> {
        MatRef::from_column_major_slice(&self.data, self.nrows, self.ncols)
    }

    pub fn to_faer(&self) -> Mat<f64> {
        self.as_faer().to_owned()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// alpha * self + beta * other.
    pub fn lin_comb(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        if (self.nrows, self.ncols) != (other.nrows, other.ncols) {
            return Err(Error::DimensionMismatch {
                what: "signal block",
                expected: self.nrows * self.ncols,
                found: other.nrows * other.ncols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Self::from_column_major(self.nrows, self.ncols, data)
    }

    /// Keeps the first `k` columns.
    pub fn truncate_columns(mut self, k: usize) -> Self {
        let k = k.min(self.ncols);
        self.data.truncate(k * self.nrows);
        self.ncols = k;
        self
    }
}

/// N x d block with i.i.d. N(0, 1/d) entries. Column `j` comes from stream `j` of
/// `seed`, so any column can be regenerated (or generated in parallel) on its own.
pub fn gaussian_signals(n: usize, d: usize, seed: u64) -> Result<SignalMatrix> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter(format!(
            "signal block needs N, d >= 1, got N = {n}, d = {d}"
        )));
    }
    let std = 1.0 / (d as f64).sqrt();
    let mut out = SignalMatrix::zeros(n, d);
    for j in 0..d {
        let mut rng = stream_rng(seed, j as u64);
        for v in out.col_mut(j) {
            let z: f64 = rng.sample(StandardNormal);
            *v = std * z;
        }
    }
    out.seed = Some(seed);
    Ok(out)
}
