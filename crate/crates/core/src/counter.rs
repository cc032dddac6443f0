//! Operation counters, so cost claims can be asserted exactly instead of timed.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

#[derive(Debug, Default)]
pub struct OpCounter {
    block_products: AtomicU64,
    matvecs: AtomicU64,
    svd_calls: AtomicU64,
    svd_cubic: AtomicU64,
    dense_filters: AtomicU64,
}

/// Point-in-time copy of an [`OpCounter`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OpCounts {
    /// Sparse operator times signal-block products.
    pub block_products: u64,
    /// Sparse operator times single-signal products (one per column per block product).
    pub matvecs: u64,
    pub svd_calls: u64,
    /// Sum of d^3 over the thin SVDs of N x d blocks.
    pub svd_cubic: u64,
    /// Dense oracle filter applications.
    pub dense_filters: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add_block_products(&self, products: u64, columns: u64) {
        self.block_products.fetch_add(products, Ordering::Relaxed);
        self.matvecs.fetch_add(products * columns, Ordering::Relaxed);
    }

    pub(crate) fn add_svd(&self, ncols: u64) {
        self.svd_calls.fetch_add(1, Ordering::Relaxed);
        self.svd_cubic.fetch_add(ncols.pow(3), Ordering::Relaxed);
    }

    pub(crate) fn add_dense_filter(&self) {
        self.dense_filters.fetch_add(1, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> OpCounts {
        OpCounts {
            block_products: self.block_products.load(Ordering::Relaxed),
            matvecs: self.matvecs.load(Ordering::Relaxed),
            svd_calls: self.svd_calls.load(Ordering::Relaxed),
            svd_cubic: self.svd_cubic.load(Ordering::Relaxed),
            dense_filters: self.dense_filters.load(Ordering::Relaxed),
        }
    }
}

impl std::ops::Sub for OpCounts {
    type Output = OpCounts;

    fn sub(self, rhs: Self) -> Self {
        OpCounts {
            block_products: self.block_products - rhs.block_products,
            matvecs: self.matvecs - rhs.matvecs,
            svd_calls: self.svd_calls - rhs.svd_calls,
            svd_cubic: self.svd_cubic - rhs.svd_cubic,
            dense_filters: self.dense_filters - rhs.dense_filters,
        }
    }
}
