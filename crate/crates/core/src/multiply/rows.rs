//! Per-worker row computation, dispatched on the algorithm.

use crate::accum::{
    hash_spgevm, heap_spgevm, mca_spgevm, msa_spgevm, Combine, HashAccumulator, HeapAccumulator,
    McaAccumulator, MsaAccumulator, RowCounters, RowInput, SparseRow,
};
use crate::multiply::inner::inner_row;
use crate::multiply::plan::Algorithm;
use crate::multiply::Rhs;
use crate::sparse::{CsrMatrix, MaskView};

/// Shared read-only inputs of one multiply.
pub(crate) struct Inputs<'a, T> {
    pub mask: MaskView<'a>,
    pub a: &'a CsrMatrix<T>,
    pub b: Rhs<'a, T>,
    /// Row lengths of `B`, needed to count flops when `B` is column-major.
    pub b_row_nnz: Option<Vec<usize>>,
}

impl<'a, T: Copy> Inputs<'a, T> {
    pub fn new(mask: MaskView<'a>, a: &'a CsrMatrix<T>, b: Rhs<'a, T>) -> Self {
        let b_row_nnz = match b {
            Rhs::Csr(_) => None,
            Rhs::Csc(csc) => {
                let mut counts = vec![0usize; csc.nrows()];
                for &r in csc.row_idx() {
                    counts[r] += 1;
                }
                Some(counts)
            }
        };
        Inputs {
            mask,
            a,
            b,
            b_row_nnz,
        }
    }

    /// `flops(A_i* · B)`.
    pub fn row_flops(&self, i: usize) -> u64 {
        let cols = self.a.row(i).0;
        match (&self.b, &self.b_row_nnz) {
            (Rhs::Csr(b), _) => cols.iter().map(|&k| b.row_nnz(k) as u64).sum(),
            (Rhs::Csc(_), Some(n)) => cols.iter().map(|&k| n[k] as u64).sum(),
            (Rhs::Csc(_), None) => unreachable!(),
        }
    }

    /// Upper bound on the nnz of output row `i` used by one-phase assembly.
    pub fn row_bound(&self, i: usize) -> usize {
        if self.mask.is_complemented() {
            (self.row_flops(i).min(self.mask.ncols() as u64)) as usize
        } else {
            self.mask.row(i).len()
        }
    }
}

/// Counters gathered by one worker.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct WorkerStats {
    pub counters: RowCounters,
    /// Largest occupancy / capacity seen by a hash table on a
    /// non-complemented row.
    pub hash_max_load: f64,
    pub hash_resizes: u64,
}

impl WorkerStats {
    pub fn merge(mut self, other: WorkerStats) -> WorkerStats {
        self.counters += other.counters;
        self.hash_max_load = self.hash_max_load.max(other.hash_max_load);
        self.hash_resizes += other.hash_resizes;
        self
    }
}

pub(crate) enum Worker<E> {
    Msa(MsaAccumulator<E>),
    Hash(HashAccumulator<E>),
    Mca(McaAccumulator<E>),
    Heap(HeapAccumulator),
    Inner,
}

impl<E: Copy + Default> Worker<E> {
    pub fn new(algorithm: Algorithm, ncols: usize, complemented: bool) -> Self {
        match algorithm {
            Algorithm::Msa => Worker::Msa(MsaAccumulator::new(ncols, complemented)),
            Algorithm::Hash => Worker::Hash(HashAccumulator::new(ncols)),
            Algorithm::Mca => Worker::Mca(McaAccumulator::new()),
            Algorithm::Heap(n) => Worker::Heap(HeapAccumulator::new(n)),
            Algorithm::Inner => Worker::Inner,
        }
    }

    /// Computes output row `i` into `out` (cleared first).
    pub fn row<T, C>(
        &mut self,
        inputs: &Inputs<'_, T>,
        i: usize,
        combine: &C,
        out: &mut SparseRow<E>,
        stats: &mut WorkerStats,
    ) where
        T: Copy,
        C: Combine<T, Out = E>,
    {
        out.clear();
        let (u_cols, u_vals) = inputs.a.row(i);
        let mask = inputs.mask.row(i);
        let complemented = inputs.mask.is_complemented();
        let b = match inputs.b {
            Rhs::Csr(b) => b,
            Rhs::Csc(b) => {
                debug_assert!(matches!(self, Worker::Inner));
                let flops = inputs.row_flops(i);
                stats.counters.generated += flops;
                stats.counters.evaluated += inner_row(mask, u_cols, u_vals, b, combine, out);
                return;
            }
        };
        let row = RowInput {
            mask,
            complemented,
            u_cols,
            u_vals,
            b,
        };
        let counters = &mut stats.counters;
        match self {
            Worker::Msa(acc) => msa_spgevm(acc, row, combine, out, counters),
            Worker::Hash(acc) => {
                let before = acc.resizes();
                hash_spgevm(acc, row, combine, out, counters);
                stats.hash_resizes += (acc.resizes() - before) as u64;
                if !complemented && !mask.is_empty() {
                    let load = acc.occupancy() as f64 / acc.capacity() as f64;
                    stats.hash_max_load = stats.hash_max_load.max(load);
                }
            }
            Worker::Mca(acc) => mca_spgevm(acc, row, combine, out, counters),
            Worker::Heap(acc) => heap_spgevm(acc, row, combine, out, counters),
            Worker::Inner => unreachable!("pull algorithm requires a column-major B"),
        }
    }
}
