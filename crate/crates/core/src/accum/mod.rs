//! Per-row accumulators for masked SpGEVM `v = m ⊙ (u·B)`.
//!
//! All accumulators share the `set_allowed` / `insert` / `remove` protocol.
//! `insert` takes the value as a thunk so products destined to be discarded
//! are never computed.

mod hash;
mod heap;
mod mca;
mod msa;

pub use hash::HashAccumulator;
pub use heap::{heap_insert, heap_spgevm, HeapAccumulator, HeapEntry, MaskCursor, NInspect, RowIter};
pub use mca::{mca_spgevm, McaAccumulator};
pub use msa::{msa_spgevm, MsaAccumulator};
pub use hash::hash_spgevm;

use crate::semiring::Semiring;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccumulatorState {
    NotAllowed,
    Allowed,
    Set,
}

/// The common accumulator protocol.
pub trait Accumulator<E> {
    fn set_allowed(&mut self, key: usize);

    /// Accumulates `value()` under `key` if the key may appear in the output.
    /// The thunk is not evaluated otherwise.
    fn insert<F, A>(&mut self, key: usize, value: F, add: A)
    where
        F: FnOnce() -> E,
        A: FnOnce(E, E) -> E;

    /// Returns the accumulated value if `key` is SET and resets the entry to
    /// the default state.
    fn remove(&mut self, key: usize) -> Option<E>;
}

/// How products are formed and summed inside a row computation.
///
/// The numeric pass uses the semiring; the symbolic pass runs the same
/// kernels over the unit type so only the pattern is computed.
pub trait Combine<T>: Sync {
    type Out: Copy + Default + Send + Sync;

    fn product(&self, u: T, b: T) -> Self::Out;
    fn add(&self, x: Self::Out, y: Self::Out) -> Self::Out;
}

#[derive(Debug, Clone, Copy)]
pub struct Numeric<S>(pub S);

impl<S: Semiring> Combine<S::Elem> for Numeric<S> {
    type Out = S::Elem;

    #[inline]
    fn product(&self, u: S::Elem, b: S::Elem) -> S::Elem {
        self.0.multiply(u, b)
    }

    #[inline]
    fn add(&self, x: S::Elem, y: S::Elem) -> S::Elem {
        self.0.add(x, y)
    }
}

/// Pattern-only combination: no values are ever produced.
#[derive(Debug, Clone, Copy, Default)]
pub struct Symbolic;

impl<T> Combine<T> for Symbolic {
    type Out = ();

    #[inline]
    fn product(&self, _u: T, _b: T) {}

    #[inline]
    fn add(&self, _x: (), _y: ()) {}
}

/// One row of the masked product: mask row `m`, input row `u` and `B`.
#[derive(Debug, Clone, Copy)]
pub struct RowInput<'a, T> {
    pub mask: &'a [usize],
    pub complemented: bool,
    pub u_cols: &'a [usize],
    pub u_vals: &'a [T],
    pub b: &'a CsrMatrix<T>,
}

impl<'a, T> RowInput<'a, T> {
    /// `flops(u·B)`: products generated by the unmasked row computation.
    pub fn flops(&self) -> u64 {
        self.u_cols.iter().map(|&k| self.b.row_nnz(k) as u64).sum()
    }
}

/// Multiplication counters for a row computation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RowCounters {
    /// Products the unmasked computation would form, `flops(u·B)`.
    pub generated: u64,
    /// Products actually evaluated.
    pub evaluated: u64,
}

impl std::ops::AddAssign for RowCounters {
    fn add_assign(&mut self, rhs: Self) {
        self.generated += rhs.generated;
        self.evaluated += rhs.evaluated;
    }
}

/// Sorted output row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseRow<E> {
    pub cols: Vec<usize>,
    pub vals: Vec<E>,
}

impl<E> SparseRow<E> {
    pub fn new() -> Self {
        SparseRow {
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn clear(&mut self) {
        self.cols.clear();
        self.vals.clear();
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    #[inline]
    pub(crate) fn push(&mut self, col: usize, val: E) {
        self.cols.push(col);
        self.vals.push(val);
    }
}
