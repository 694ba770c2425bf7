use super::{Accumulator, AccumulatorState, Combine, RowCounters, RowInput, SparseRow};

/// Masked sparse accumulator: dense `values` and `states` arrays of length
/// `ncols`, allocated once per worker and reset entry by entry.
#[derive(Debug, Clone)]
pub struct MsaAccumulator<E> {
    values: Vec<E>,
    states: Vec<AccumulatorState>,
    default_state: AccumulatorState,
    // keys that went ALLOWED -> SET; only tracked under a complemented mask
    inserted: Vec<usize>,
}

impl<E: Copy + Default> MsaAccumulator<E> {
    pub fn new(ncols: usize, complemented: bool) -> Self {
        let default_state = if complemented {
            AccumulatorState::Allowed
        } else {
            AccumulatorState::NotAllowed
        };
        MsaAccumulator {
            values: vec![E::default(); ncols],
            states: vec![default_state; ncols],
            default_state,
            inserted: Vec::new(),
        }
    }

    #[inline]
    pub fn is_complemented(&self) -> bool {
        self.default_state == AccumulatorState::Allowed
    }

    pub fn ncols(&self) -> usize {
        self.states.len()
    }

    #[inline]
    pub fn state(&self, key: usize) -> AccumulatorState {
        self.states[key]
    }

    pub fn default_state(&self) -> AccumulatorState {
        self.default_state
    }

    /// Whether every entry is back in the default state.
    pub fn is_clean(&self) -> bool {
        self.inserted.is_empty() && self.states.iter().all(|&s| s == self.default_state)
    }

    #[inline]
    pub fn set_not_allowed(&mut self, key: usize) {
        self.states[key] = AccumulatorState::NotAllowed;
    }

    /// Keys inserted since the last gather (complemented mode only).
    pub fn inserted_keys(&self) -> &[usize] {
        &self.inserted
    }
}

impl<E: Copy + Default> Accumulator<E> for MsaAccumulator<E> {
    #[inline]
    fn set_allowed(&mut self, key: usize) {
        self.states[key] = AccumulatorState::Allowed;
    }

    #[inline]
    fn insert<F, A>(&mut self, key: usize, value: F, add: A)
    where
        F: FnOnce() -> E,
        A: FnOnce(E, E) -> E,
    {
        match self.states[key] {
            AccumulatorState::NotAllowed => {}
            AccumulatorState::Allowed => {
                self.states[key] = AccumulatorState::Set;
                self.values[key] = value();
                if self.default_state == AccumulatorState::Allowed {
                    self.inserted.push(key);
                }
            }
            AccumulatorState::Set => {
                self.values[key] = add(self.values[key], value());
            }
        }
    }

    #[inline]
    fn remove(&mut self, key: usize) -> Option<E> {
        let state = std::mem::replace(&mut self.states[key], self.default_state);
        (state == AccumulatorState::Set).then(|| self.values[key])
    }
}

/// Masked SpGEVM over an MSA. Output columns come out sorted.
pub fn msa_spgevm<T, C>(
    acc: &mut MsaAccumulator<C::Out>,
    row: RowInput<'_, T>,
    combine: &C,
    out: &mut SparseRow<C::Out>,
    counters: &mut RowCounters,
) where
    T: Copy,
    C: Combine<T>,
{
    debug_assert_eq!(acc.is_complemented(), row.complemented);
    let b = row.b;
    let mut evaluated = 0u64;

    if row.complemented {
        for &j in row.mask {
            acc.set_not_allowed(j);
        }
    } else {
        for &j in row.mask {
            acc.set_allowed(j);
        }
    }

    for (&k, &uk) in row.u_cols.iter().zip(row.u_vals) {
        let (cols, vals) = b.row(k);
        counters.generated += cols.len() as u64;
        for (&j, &bkj) in cols.iter().zip(vals) {
            acc.insert(
                j,
                || {
                    evaluated += 1;
                    combine.product(uk, bkj)
                },
                |x, y| combine.add(x, y),
            );
        }
    }
    counters.evaluated += evaluated;

    if row.complemented {
        let mut keys = std::mem::take(&mut acc.inserted);
        keys.sort_unstable();
        for &j in &keys {
            if let Some(v) = acc.remove(j) {
                out.push(j, v);
            }
        }
        keys.clear();
        acc.inserted = keys;
        // restore NOT-ALLOWED mask entries to the default
        for &j in row.mask {
            acc.remove(j);
        }
    } else {
        for &j in row.mask {
            if let Some(v) = acc.remove(j) {
                out.push(j, v);
            }
        }
    }
}
