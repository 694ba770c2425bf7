//! Heap-based masked SpGEVM: a multiway merge of the rows of `B` selected by
//! `u`, intersected (or differenced) with the sorted mask row on the fly.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{Combine, RowCounters, RowInput, SparseRow};

/// How much of the mask to scan before pushing a row iterator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NInspect {
    /// Inspect at most this many mask entries; `Limit(0)` pushes
    /// unconditionally.
    Limit(usize),
    /// Merge until a match or exhaustion.
    Unbounded,
}

/// Cursor over the nonzeros of one row of `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowIter {
    /// Position in `B`'s column-index array.
    pub pos: usize,
    pub end: usize,
    /// Which nonzero of `u` scales this row.
    pub u_idx: usize,
}

impl RowIter {
    #[inline]
    pub fn is_valid(&self) -> bool {
        self.pos < self.end
    }

    #[inline]
    pub fn next(self) -> RowIter {
        RowIter {
            pos: self.pos + 1,
            ..self
        }
    }
}

/// Cursor over a sorted mask row.
#[derive(Debug, Clone, Copy)]
pub struct MaskCursor<'a> {
    pub mask: &'a [usize],
    pub pos: usize,
}

impl<'a> MaskCursor<'a> {
    pub fn new(mask: &'a [usize]) -> Self {
        MaskCursor { mask, pos: 0 }
    }

    #[inline]
    pub fn current(&self) -> Option<usize> {
        self.mask.get(self.pos).copied()
    }
}

/// Heap element ordered by current column, then by position in `B` so that
/// pops are deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct HeapEntry {
    pub col: usize,
    pub pos: usize,
    pub end: usize,
    pub u_idx: usize,
}

impl HeapEntry {
    #[inline]
    fn iter(&self) -> RowIter {
        RowIter {
            pos: self.pos,
            end: self.end,
            u_idx: self.u_idx,
        }
    }
}

type MinHeap = BinaryHeap<Reverse<HeapEntry>>;

/// Pushes `it` onto the heap, optionally skipping ahead past columns that
/// the mask rules out. The mask cursor is a copy; the caller's cursor does
/// not move, because other queued iterators may still hit earlier mask
/// entries.
pub fn heap_insert(
    pq: &mut BinaryHeap<Reverse<HeapEntry>>,
    b_cols: &[usize],
    mut it: RowIter,
    mut mask: MaskCursor<'_>,
    n_inspect: NInspect,
) {
    let push = |pq: &mut MinHeap, it: RowIter| {
        pq.push(Reverse(HeapEntry {
            col: b_cols[it.pos],
            pos: it.pos,
            end: it.end,
            u_idx: it.u_idx,
        }))
    };
    if !it.is_valid() {
        return;
    }
    let mut budget = match n_inspect {
        NInspect::Limit(0) => {
            push(pq, it);
            return;
        }
        NInspect::Limit(n) => Some(n),
        NInspect::Unbounded => None,
    };
    while it.is_valid() {
        let Some(m) = mask.current() else { return };
        let c = b_cols[it.pos];
        if c == m {
            push(pq, it);
            return;
        } else if c < m {
            it = it.next();
        } else {
            mask.pos += 1;
            if let Some(b) = budget.as_mut() {
                *b -= 1;
                if *b == 0 {
                    push(pq, it);
                    return;
                }
            }
        }
    }
}

/// Reusable heap state for one worker.
#[derive(Debug, Clone)]
pub struct HeapAccumulator {
    heap: MinHeap,
    n_inspect: NInspect,
    max_len: usize,
    trace: Option<Vec<usize>>,
}

impl HeapAccumulator {
    pub fn new(n_inspect: NInspect) -> Self {
        HeapAccumulator {
            heap: BinaryHeap::new(),
            n_inspect,
            max_len: 0,
            trace: None,
        }
    }

    pub fn n_inspect(&self) -> NInspect {
        self.n_inspect
    }

    /// Largest heap size seen since construction.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Records the column of every popped iterator.
    pub fn enable_trace(&mut self) {
        self.trace = Some(Vec::new());
    }

    pub fn take_trace(&mut self) -> Vec<usize> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }
}

/// Masked SpGEVM via multiway merge. Under a complemented mask the products
/// outside the mask are kept and no mask inspection happens before pushes.
pub fn heap_spgevm<T, C>(
    acc: &mut HeapAccumulator,
    row: RowInput<'_, T>,
    combine: &C,
    out: &mut SparseRow<C::Out>,
    counters: &mut RowCounters,
) where
    T: Copy,
    C: Combine<T>,
{
    let b = row.b;
    let b_cols = b.col_idx();
    let b_vals = b.values();
    let n_inspect = if row.complemented {
        NInspect::Limit(0)
    } else {
        acc.n_inspect
    };
    counters.generated += row.flops();
    if !row.complemented && row.mask.is_empty() {
        return;
    }

    let pq = &mut acc.heap;
    pq.clear();
    let mut mask = MaskCursor::new(row.mask);
    for (u_idx, &k) in row.u_cols.iter().enumerate() {
        let it = RowIter {
            pos: b.row_ptr()[k],
            end: b.row_ptr()[k + 1],
            u_idx,
        };
        heap_insert(pq, b_cols, it, mask, n_inspect);
    }
    acc.max_len = acc.max_len.max(pq.len());

    let mut evaluated = 0u64;
    let mut emit = |out: &mut SparseRow<C::Out>, e: &HeapEntry| {
        evaluated += 1;
        let v = combine.product(row.u_vals[e.u_idx], b_vals[e.pos]);
        match out.cols.last() {
            Some(&last) if last == e.col => {
                let prev = out.vals.last_mut().unwrap();
                *prev = combine.add(*prev, v);
            }
            _ => out.push(e.col, v),
        }
    };

    while let Some(Reverse(top)) = pq.pop() {
        if let Some(trace) = acc.trace.as_mut() {
            trace.push(top.col);
        }
        while mask.current().is_some_and(|m| m < top.col) {
            mask.pos += 1;
        }
        let hit = mask.current() == Some(top.col);
        if row.complemented {
            if !hit {
                emit(out, &top);
            }
        } else {
            if mask.current().is_none() {
                break;
            }
            if hit {
                emit(out, &top);
            }
        }
        heap_insert(pq, b_cols, top.iter().next(), mask, n_inspect);
        acc.max_len = acc.max_len.max(pq.len());
    }
    pq.clear();
    counters.evaluated += evaluated;
}
