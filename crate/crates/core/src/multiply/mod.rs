//! Full-matrix masked multiply drivers.
//!
//! Rows are independent: each is computed start to finish by one worker
//! owning one accumulator, and chunks of `grain` rows are handed out
//! dynamically. Per-row accumulation order is fixed by the algorithm, so the
//! result does not depend on the worker count or on scheduling.

mod inner;
mod plan;
mod rows;

use std::collections::HashMap;
use std::ops::Range;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use rayon::prelude::*;

use crate::accum::{Combine, Numeric, SparseRow, Symbolic};
use crate::error::{Error, Result};
use crate::semiring::Semiring;
use crate::sparse::{CscMatrix, CsrMatrix, MaskView};

pub use plan::{Algorithm, MultiplyPlan, Phases, DEFAULT_GRAIN};
use rows::{Inputs, Worker, WorkerStats};

/// Right-hand operand in row- or column-major storage. Push algorithms need
/// rows of `B`; the pull algorithm needs columns.
#[derive(Debug, Clone, Copy)]
pub enum Rhs<'a, T> {
    Csr(&'a CsrMatrix<T>),
    Csc(&'a CscMatrix<T>),
}

impl<'a, T> Rhs<'a, T> {
    pub fn nrows(&self) -> usize {
        match self {
            Rhs::Csr(b) => b.nrows(),
            Rhs::Csc(b) => b.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            Rhs::Csr(b) => b.ncols(),
            Rhs::Csc(b) => b.ncols(),
        }
    }
}

impl<'a, T> From<&'a CsrMatrix<T>> for Rhs<'a, T> {
    fn from(b: &'a CsrMatrix<T>) -> Self {
        Rhs::Csr(b)
    }
}

impl<'a, T> From<&'a CscMatrix<T>> for Rhs<'a, T> {
    fn from(b: &'a CscMatrix<T>) -> Self {
        Rhs::Csc(b)
    }
}

/// Counters and timings of one multiply.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MultiplyStats {
    /// `flops(A·B)`: products formed by the unmasked row-wise computation.
    pub generated_flops: u64,
    /// Multiplications actually performed in the numeric pass.
    pub evaluated_multiplies: u64,
    /// Output entries allocated for the numeric pass.
    pub allocated_entries: usize,
    pub output_nnz: usize,
    pub symbolic_seconds: f64,
    pub numeric_seconds: f64,
    /// Peak hash table occupancy / capacity over non-complemented rows
    /// (zero for other algorithms).
    pub hash_max_load: f64,
    /// Hash tables that outgrew their per-row bound in the numeric pass.
    pub hash_resizes: u64,
}

impl MultiplyStats {
    pub fn seconds(&self) -> f64 {
        self.symbolic_seconds + self.numeric_seconds
    }
}

#[derive(Debug, Clone)]
pub struct MultiplyOutput<E> {
    pub matrix: CsrMatrix<E>,
    pub stats: MultiplyStats,
}

/// `flops(A·B)`: the number of scalar products in the unmasked product.
pub fn flops<T>(a: &CsrMatrix<T>, b: &CsrMatrix<T>) -> u64 {
    a.col_idx().iter().map(|&k| b.row_nnz(k) as u64).sum()
}

fn check_inputs<T>(mask: &MaskView<'_>, a: &CsrMatrix<T>, b: &Rhs<'_, T>, plan: &MultiplyPlan) -> Result<()> {
    plan.check(mask.is_complemented())?;
    if a.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{} but B is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    if mask.nrows() != a.nrows() || mask.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "mask is {}x{} but A·B is {}x{}",
            mask.nrows(),
            mask.ncols(),
            a.nrows(),
            b.ncols()
        )));
    }
    match (plan.algorithm.pulls(), b) {
        (true, Rhs::Csr(_)) => Err(Error::UnsupportedPlan(
            "the inner-product algorithm needs B in CSC form".into(),
        )),
        (false, Rhs::Csc(_)) => Err(Error::UnsupportedPlan(format!(
            "{} needs B in CSR form",
            plan.algorithm
        ))),
        _ => Ok(()),
    }
}

fn pool(workers: usize) -> Result<Arc<rayon::ThreadPool>> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS.get_or_init(Default::default).lock().unwrap();
    if let Some(p) = pools.get(&workers) {
        return Ok(p.clone());
    }
    let p = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .thread_name(|i| format!("mspgemm-{i}"))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start {workers} workers: {e}")))?;
    let p = Arc::new(p);
    pools.insert(workers, p.clone());
    Ok(p)
}

/// Runs `f` with `plan.workers` threads (inline when single-threaded).
fn with_workers<R: Send>(plan: &MultiplyPlan, f: impl FnOnce() -> R + Send) -> Result<R> {
    let workers = plan.effective_workers();
    if workers <= 1 {
        Ok(f())
    } else {
        Ok(pool(workers)?.install(f))
    }
}

/// One unit of scheduled work: a range of rows and the output region they
/// write into.
struct Chunk<'o, E> {
    rows: Range<usize>,
    /// Output offset of each row in `rows`, relative to the chunk.
    offsets: &'o [usize],
    cols: &'o mut [usize],
    vals: &'o mut [E],
    counts: &'o mut [usize],
}

/// Splits rows into chunks of `grain` with output regions delimited by
/// `ptr` (row start offsets, length nrows + 1).
fn split_chunks<'o, E>(
    nrows: usize,
    grain: usize,
    ptr: &'o [usize],
    mut cols: &'o mut [usize],
    mut vals: &'o mut [E],
    mut counts: &'o mut [usize],
) -> Vec<Chunk<'o, E>> {
    let mut chunks = Vec::with_capacity(nrows.div_ceil(grain));
    let mut start = 0;
    while start < nrows {
        let end = (start + grain).min(nrows);
        let width = ptr[end] - ptr[start];
        let (c, rest_c) = std::mem::take(&mut cols).split_at_mut(width);
        let (v, rest_v) = std::mem::take(&mut vals).split_at_mut(width);
        let (n, rest_n) = std::mem::take(&mut counts).split_at_mut(end - start);
        cols = rest_c;
        vals = rest_v;
        counts = rest_n;
        chunks.push(Chunk {
            rows: start..end,
            offsets: &ptr[start..=end],
            cols: c,
            vals: v,
            counts: n,
        });
        start = end;
    }
    chunks
}

/// Computes every row of the chunk list in parallel, writing each row into
/// its region. Panics if a row exceeds its region.
fn run_chunks<T, C>(
    inputs: &Inputs<'_, T>,
    algorithm: Algorithm,
    combine: &C,
    chunks: Vec<Chunk<'_, C::Out>>,
) -> WorkerStats
where
    T: Copy + Sync,
    C: Combine<T>,
{
    let ncols = inputs.mask.ncols();
    let complemented = inputs.mask.is_complemented();
    chunks
        .into_par_iter()
        .with_max_len(1)
        .map_init(
            || (Worker::<C::Out>::new(algorithm, ncols, complemented), SparseRow::new()),
            |(worker, row), chunk| {
                let mut stats = WorkerStats::default();
                let base = chunk.offsets[0];
                for (r, i) in chunk.rows.clone().enumerate() {
                    worker.row(inputs, i, combine, row, &mut stats);
                    let start = chunk.offsets[r] - base;
                    let room = chunk.offsets[r + 1] - chunk.offsets[r];
                    assert!(
                        row.len() <= room,
                        "row {i} produced {} entries but only {room} were reserved",
                        row.len()
                    );
                    chunk.cols[start..start + row.len()].copy_from_slice(&row.cols);
                    chunk.vals[start..start + row.len()].copy_from_slice(&row.vals);
                    chunk.counts[r] = row.len();
                }
                stats
            },
        )
        .reduce(WorkerStats::default, WorkerStats::merge)
}

fn exclusive_scan(counts: impl Iterator<Item = usize>, n: usize) -> Vec<usize> {
    let mut ptr = Vec::with_capacity(n + 1);
    ptr.push(0);
    let mut acc = 0usize;
    for c in counts {
        acc += c;
        ptr.push(acc);
    }
    ptr
}

/// Per-row output counts from a pattern-only pass of the plan's algorithm.
pub fn symbolic_phase<T>(
    mask: MaskView<'_>,
    a: &CsrMatrix<T>,
    b: Rhs<'_, T>,
    plan: &MultiplyPlan,
) -> Result<Vec<usize>>
where
    T: Copy + Send + Sync,
{
    check_inputs(&mask, a, &b, plan)?;
    let inputs = Inputs::new(mask, a, b);
    with_workers(plan, || symbolic_counts(&inputs, plan))
}

fn symbolic_counts<T: Copy + Sync>(inputs: &Inputs<'_, T>, plan: &MultiplyPlan) -> Vec<usize> {
    let nrows = inputs.a.nrows();
    let ncols = inputs.mask.ncols();
    let complemented = inputs.mask.is_complemented();
    let mut counts = vec![0usize; nrows];
    counts
        .par_chunks_mut(plan.grain)
        .with_max_len(1)
        .enumerate()
        .for_each_init(
            || (Worker::<()>::new(plan.algorithm, ncols, complemented), SparseRow::new()),
            |(worker, row), (c, out)| {
                let mut stats = WorkerStats::default();
                for (r, n) in out.iter_mut().enumerate() {
                    worker.row(inputs, c * plan.grain + r, &Symbolic, row, &mut stats);
                    *n = row.len();
                }
            },
        );
    counts
}

/// `C = M ⊙ (A·B)`, or `¬M ⊙ (A·B)` when the mask is complemented.
///
/// An output entry exists iff at least one product landed on an admitted
/// position; a sum that cancels to zero is stored.
pub fn masked_multiply<S: Semiring>(
    mask: MaskView<'_>,
    a: &CsrMatrix<S::Elem>,
    b: Rhs<'_, S::Elem>,
    plan: &MultiplyPlan,
    semiring: S,
) -> Result<MultiplyOutput<S::Elem>> {
    check_inputs(&mask, a, &b, plan)?;
    let inputs = Inputs::new(mask, a, b);
    with_workers(plan, || match plan.phases {
        Phases::One => one_phase(&inputs, plan, semiring),
        Phases::Two => two_phase(&inputs, plan, semiring),
    })
}

fn one_phase<S: Semiring>(
    inputs: &Inputs<'_, S::Elem>,
    plan: &MultiplyPlan,
    semiring: S,
) -> MultiplyOutput<S::Elem> {
    let nrows = inputs.a.nrows();
    let start = Instant::now();

    let bounds: Vec<usize> = (0..nrows).into_par_iter().map(|i| inputs.row_bound(i)).collect();
    let ptr = exclusive_scan(bounds.into_iter(), nrows);
    let reserved = ptr[nrows];
    let mut tmp_cols = vec![0usize; reserved];
    let mut tmp_vals = vec![S::Elem::default(); reserved];
    let mut counts = vec![0usize; nrows];
    let chunks = split_chunks(nrows, plan.grain, &ptr, &mut tmp_cols, &mut tmp_vals, &mut counts);
    let ws = run_chunks(inputs, plan.algorithm, &Numeric(semiring), chunks);

    let row_ptr = exclusive_scan(counts.iter().copied(), nrows);
    let nnz = row_ptr[nrows];
    let mut col_idx = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    for i in 0..nrows {
        let span = ptr[i]..ptr[i] + counts[i];
        col_idx.extend_from_slice(&tmp_cols[span.clone()]);
        values.extend_from_slice(&tmp_vals[span]);
    }
    let matrix = CsrMatrix::from_parts_unchecked(nrows, inputs.mask.ncols(), row_ptr, col_idx, values);

    MultiplyOutput {
        stats: MultiplyStats {
            generated_flops: ws.counters.generated,
            evaluated_multiplies: ws.counters.evaluated,
            allocated_entries: reserved,
            output_nnz: nnz,
            symbolic_seconds: 0.0,
            numeric_seconds: start.elapsed().as_secs_f64(),
            hash_max_load: ws.hash_max_load,
            hash_resizes: ws.hash_resizes,
        },
        matrix,
    }
}

fn two_phase<S: Semiring>(
    inputs: &Inputs<'_, S::Elem>,
    plan: &MultiplyPlan,
    semiring: S,
) -> MultiplyOutput<S::Elem> {
    let nrows = inputs.a.nrows();
    let start = Instant::now();
    let counts = symbolic_counts(inputs, plan);
    let row_ptr = exclusive_scan(counts.into_iter(), nrows);
    let symbolic_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let nnz = row_ptr[nrows];
    let mut col_idx = vec![0usize; nnz];
    let mut values = vec![S::Elem::default(); nnz];
    let mut written = vec![0usize; nrows];
    let chunks = split_chunks(nrows, plan.grain, &row_ptr, &mut col_idx, &mut values, &mut written);
    let ws = run_chunks(inputs, plan.algorithm, &Numeric(semiring), chunks);
    for i in 0..nrows {
        assert_eq!(
            written[i],
            row_ptr[i + 1] - row_ptr[i],
            "numeric pass disagrees with symbolic count on row {i}"
        );
    }
    let matrix = CsrMatrix::from_parts_unchecked(nrows, inputs.mask.ncols(), row_ptr, col_idx, values);

    MultiplyOutput {
        stats: MultiplyStats {
            generated_flops: ws.counters.generated,
            evaluated_multiplies: ws.counters.evaluated,
            allocated_entries: nnz,
            output_nnz: nnz,
            symbolic_seconds,
            numeric_seconds: start.elapsed().as_secs_f64(),
            hash_max_load: ws.hash_max_load,
            hash_resizes: ws.hash_resizes,
        },
        matrix,
    }
}

/// Pull-based multiply with `B` given column-major.
pub fn inner_product_multiply<S: Semiring>(
    mask: MaskView<'_>,
    a: &CsrMatrix<S::Elem>,
    b: &CscMatrix<S::Elem>,
    phases: Phases,
    workers: usize,
    semiring: S,
) -> Result<MultiplyOutput<S::Elem>> {
    let plan = MultiplyPlan::new(Algorithm::Inner, phases).with_workers(workers);
    masked_multiply(mask, a, Rhs::Csc(b), &plan, semiring)
}

/// Convenience wrapper: prepares `B` in whatever layout the plan needs.
/// The conversion happens outside the multiply's timers.
pub fn masked_multiply_auto<S: Semiring>(
    mask: MaskView<'_>,
    a: &CsrMatrix<S::Elem>,
    b: &CsrMatrix<S::Elem>,
    plan: &MultiplyPlan,
    semiring: S,
) -> Result<MultiplyOutput<S::Elem>> {
    if plan.algorithm.pulls() {
        let csc = b.to_csc();
        masked_multiply(mask, a, Rhs::Csc(&csc), plan, semiring)
    } else {
        masked_multiply(mask, a, Rhs::Csr(b), plan, semiring)
    }
}
