//! Graph algorithms expressed as sequences of masked multiplies.

mod bc;
mod ktruss;
mod tricount;

pub use bc::{betweenness_centrality, BcConfig, Betweenness, Sources, DEFAULT_BATCH_SIZE};
pub use ktruss::{k_truss, KTruss, DEFAULT_K};
pub use tricount::{triangle_count, TriangleCount};

use crate::error::{Error, Result};
use crate::multiply::MultiplyStats;
use crate::sparse::CsrMatrix;

/// Stats of every masked multiply a kernel performed, in order.
#[derive(Debug, Clone, Default)]
pub struct KernelTrace {
    pub multiplies: Vec<MultiplyStats>,
}

impl KernelTrace {
    pub fn push(&mut self, s: MultiplyStats) {
        self.multiplies.push(s);
    }

    /// Sum of `flops(A·B)` over all multiplies.
    pub fn total_flops(&self) -> u64 {
        self.multiplies.iter().map(|s| s.generated_flops).sum()
    }

    pub fn total_evaluated(&self) -> u64 {
        self.multiplies.iter().map(|s| s.evaluated_multiplies).sum()
    }

    /// Time spent inside masked multiplies only.
    pub fn total_seconds(&self) -> f64 {
        self.multiplies.iter().map(|s| s.seconds()).sum()
    }
}

fn require_simple_symmetric<T: Copy>(g: &CsrMatrix<T>) -> Result<()> {
    if g.nrows() != g.ncols() {
        return Err(Error::NotSquare {
            nrows: g.nrows(),
            ncols: g.ncols(),
        });
    }
    if !g.is_pattern_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(())
}
