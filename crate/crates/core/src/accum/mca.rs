use super::{Accumulator, AccumulatorState, Combine, RowCounters, RowInput, SparseRow};

/// Mask-compressed accumulator: arrays of length `nnz(m)` indexed by the
/// rank of a column inside the mask row. Only ALLOWED and SET exist, since
/// every rank corresponds to a mask entry. Has no complemented form.
#[derive(Debug, Clone, Default)]
pub struct McaAccumulator<E> {
    values: Vec<E>,
    set: Vec<bool>,
}

impl<E: Copy + Default> McaAccumulator<E> {
    pub fn new() -> Self {
        McaAccumulator {
            values: Vec::new(),
            set: Vec::new(),
        }
    }

    /// Sizes the accumulator for a mask row with `mask_nnz` entries, all
    /// ALLOWED.
    pub fn prepare(&mut self, mask_nnz: usize) {
        if self.values.len() < mask_nnz {
            self.values.resize(mask_nnz, E::default());
        }
        self.set.clear();
        self.set.resize(mask_nnz, false);
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn state(&self, rank: usize) -> AccumulatorState {
        if self.set[rank] {
            AccumulatorState::Set
        } else {
            AccumulatorState::Allowed
        }
    }
}

impl<E: Copy + Default> Accumulator<E> for McaAccumulator<E> {
    /// Every rank is ALLOWED after `prepare`; this only clears a SET entry.
    fn set_allowed(&mut self, rank: usize) {
        self.set[rank] = false;
    }

    #[inline]
    fn insert<F, A>(&mut self, rank: usize, value: F, add: A)
    where
        F: FnOnce() -> E,
        A: FnOnce(E, E) -> E,
    {
        if self.set[rank] {
            self.values[rank] = add(self.values[rank], value());
        } else {
            self.set[rank] = true;
            self.values[rank] = value();
        }
    }

    #[inline]
    fn remove(&mut self, rank: usize) -> Option<E> {
        std::mem::replace(&mut self.set[rank], false).then(|| self.values[rank])
    }
}

/// Masked SpGEVM over the MCA. For each nonzero of `u`, the mask row and the
/// selected row of `B` are merged to find ranks; only intersecting products
/// are evaluated.
pub fn mca_spgevm<T, C>(
    acc: &mut McaAccumulator<C::Out>,
    row: RowInput<'_, T>,
    combine: &C,
    out: &mut SparseRow<C::Out>,
    counters: &mut RowCounters,
) where
    T: Copy,
    C: Combine<T>,
{
    assert!(!row.complemented, "MCA does not support complemented masks");
    let b = row.b;
    let mask = row.mask;
    acc.prepare(mask.len());
    let mut evaluated = 0u64;

    for (&k, &uk) in row.u_cols.iter().zip(row.u_vals) {
        let (cols, vals) = b.row(k);
        counters.generated += cols.len() as u64;
        if mask.is_empty() {
            continue;
        }
        let mut p = 0;
        for (rank, &j) in mask.iter().enumerate() {
            while p < cols.len() && cols[p] < j {
                p += 1;
            }
            if p == cols.len() {
                break;
            }
            if cols[p] == j {
                let bkj = vals[p];
                acc.insert(
                    rank,
                    || {
                        evaluated += 1;
                        combine.product(uk, bkj)
                    },
                    |x, y| combine.add(x, y),
                );
            }
        }
    }
    counters.evaluated += evaluated;

    for (rank, &j) in mask.iter().enumerate() {
        if let Some(v) = acc.remove(rank) {
            out.push(j, v);
        }
    }
}
