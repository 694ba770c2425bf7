use super::{Accumulator, AccumulatorState, Combine, RowCounters, RowInput, SparseRow};

const HASH_MULTIPLIER: u64 = 0x9E37_79B9_7F4A_7C15;
/// Capacity is at least this many times the number of distinct keys.
pub const SLOTS_PER_KEY: usize = 4;

#[derive(Debug, Clone, Copy)]
struct Slot<E> {
    key: usize,
    state: AccumulatorState,
    value: E,
}

/// Open-addressing hash accumulator with linear probing.
///
/// The table is sized per row from a bound on the number of distinct keys.
/// If a row ever holds more keys than a quarter of the capacity the table
/// doubles and rehashes; [`resizes`](Self::resizes) counts those events and
/// stays zero whenever the bound is correct. Value and state share a slot.
/// The key `ncols` marks an empty slot.
#[derive(Debug, Clone)]
pub struct HashAccumulator<E> {
    slots: Vec<Slot<E>>,
    capacity: usize,
    shift: u32,
    empty_key: usize,
    default_state: AccumulatorState,
    occupied: usize,
    max_probe: usize,
    resizes: usize,
    inserted: Vec<usize>,
}

impl<E: Copy + Default> HashAccumulator<E> {
    pub fn new(ncols: usize) -> Self {
        HashAccumulator {
            slots: Vec::new(),
            capacity: 0,
            shift: 64,
            empty_key: ncols,
            default_state: AccumulatorState::NotAllowed,
            occupied: 0,
            max_probe: 0,
            resizes: 0,
            inserted: Vec::new(),
        }
    }

    /// Capacity needed for `distinct_keys`: the smallest power of two that is
    /// at least four times larger (load factor 0.25), and at least four.
    pub fn capacity_for(distinct_keys: usize) -> usize {
        (SLOTS_PER_KEY * distinct_keys).max(4).next_power_of_two()
    }

    /// Clears the table for a new row that will hold at most `distinct_keys`
    /// keys. Complemented rows default to ALLOWED.
    pub fn prepare(&mut self, distinct_keys: usize, complemented: bool) {
        let capacity = Self::capacity_for(distinct_keys);
        let empty = Slot {
            key: self.empty_key,
            state: AccumulatorState::NotAllowed,
            value: E::default(),
        };
        if self.slots.len() < capacity {
            self.slots.resize(capacity, empty);
        }
        self.slots[..capacity].fill(empty);
        self.capacity = capacity;
        self.shift = 64 - capacity.trailing_zeros();
        self.default_state = if complemented {
            AccumulatorState::Allowed
        } else {
            AccumulatorState::NotAllowed
        };
        self.occupied = 0;
        self.max_probe = 0;
        self.inserted.clear();
    }

    #[inline]
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Slots currently holding a key.
    #[inline]
    pub fn occupancy(&self) -> usize {
        self.occupied
    }

    /// Growths since construction.
    pub fn resizes(&self) -> usize {
        self.resizes
    }

    /// Longest probe sequence since the last `prepare`.
    pub fn max_probe(&self) -> usize {
        self.max_probe
    }

    #[inline]
    fn home(&self, key: usize) -> usize {
        ((key as u64).wrapping_mul(HASH_MULTIPLIER) >> self.shift) as usize
    }

    /// Slot holding `key`, or the empty slot where it would go.
    #[inline]
    fn locate(&mut self, key: usize) -> (usize, bool) {
        debug_assert!(self.capacity > 0, "prepare() not called");
        let mask = self.capacity - 1;
        let mut pos = self.home(key);
        for probe in 1..=self.capacity {
            let k = self.slots[pos].key;
            if k == key || k == self.empty_key {
                self.max_probe = self.max_probe.max(probe);
                return (pos, k == key);
            }
            pos = (pos + 1) & mask;
        }
        unreachable!("hash accumulator full at capacity {}", self.capacity);
    }

    /// Stores a new key in the empty slot `pos`, growing the table if the
    /// load factor would exceed 1/4.
    #[inline]
    fn claim(&mut self, pos: usize, key: usize, state: AccumulatorState, value: E) {
        self.slots[pos] = Slot { key, state, value };
        self.occupied += 1;
        if self.occupied * SLOTS_PER_KEY > self.capacity {
            self.grow();
        }
    }

    #[cold]
    fn grow(&mut self) {
        let live: Vec<Slot<E>> = self.slots[..self.capacity]
            .iter()
            .filter(|s| s.key != self.empty_key)
            .copied()
            .collect();
        let capacity = Self::capacity_for(live.len());
        let empty = Slot {
            key: self.empty_key,
            state: AccumulatorState::NotAllowed,
            value: E::default(),
        };
        if self.slots.len() < capacity {
            self.slots.resize(capacity, empty);
        }
        self.slots[..capacity].fill(empty);
        self.capacity = capacity;
        self.shift = 64 - capacity.trailing_zeros();
        for slot in live {
            let (pos, _) = self.locate(slot.key);
            self.slots[pos] = slot;
        }
        self.resizes += 1;
    }

    pub fn set_not_allowed(&mut self, key: usize) {
        let (pos, found) = self.locate(key);
        if found {
            self.slots[pos].state = AccumulatorState::NotAllowed;
        } else {
            self.claim(pos, key, AccumulatorState::NotAllowed, E::default());
        }
    }

    pub fn state(&mut self, key: usize) -> AccumulatorState {
        match self.locate(key) {
            (pos, true) => self.slots[pos].state,
            _ => self.default_state,
        }
    }

    /// Keys inserted since `prepare` under a complemented mask.
    pub fn inserted_keys(&self) -> &[usize] {
        &self.inserted
    }
}

impl<E: Copy + Default> Accumulator<E> for HashAccumulator<E> {
    fn set_allowed(&mut self, key: usize) {
        let (pos, found) = self.locate(key);
        if found {
            self.slots[pos].state = AccumulatorState::Allowed;
        } else {
            self.claim(pos, key, AccumulatorState::Allowed, E::default());
        }
    }

    #[inline]
    fn insert<F, A>(&mut self, key: usize, value: F, add: A)
    where
        F: FnOnce() -> E,
        A: FnOnce(E, E) -> E,
    {
        let (pos, found) = self.locate(key);
        let state = if found {
            self.slots[pos].state
        } else {
            self.default_state
        };
        match state {
            AccumulatorState::NotAllowed => {}
            AccumulatorState::Allowed => {
                if found {
                    let slot = &mut self.slots[pos];
                    slot.state = AccumulatorState::Set;
                    slot.value = value();
                } else {
                    self.claim(pos, key, AccumulatorState::Set, value());
                }
                if self.default_state == AccumulatorState::Allowed {
                    self.inserted.push(key);
                }
            }
            AccumulatorState::Set => {
                let slot = &mut self.slots[pos];
                slot.value = add(slot.value, value());
            }
        }
    }

    /// The slot keeps its key so later probe chains stay intact; `prepare`
    /// empties the table for the next row.
    #[inline]
    fn remove(&mut self, key: usize) -> Option<E> {
        let (pos, found) = self.locate(key);
        if !found {
            return None;
        }
        let slot = &mut self.slots[pos];
        let state = std::mem::replace(&mut slot.state, self.default_state);
        (state == AccumulatorState::Set).then_some(slot.value)
    }
}

/// Masked SpGEVM over the hash accumulator.
pub fn hash_spgevm<T, C>(
    acc: &mut HashAccumulator<C::Out>,
    row: RowInput<'_, T>,
    combine: &C,
    out: &mut SparseRow<C::Out>,
    counters: &mut RowCounters,
) where
    T: Copy,
    C: Combine<T>,
{
    let b = row.b;
    let flops = row.flops();
    if row.complemented {
        // mask keys plus every distinct product column
        let bound = (row.mask.len() as u64 + flops).min(b.ncols() as u64) as usize;
        acc.prepare(bound, true);
        for &j in row.mask {
            acc.set_not_allowed(j);
        }
    } else {
        if row.mask.is_empty() {
            counters.generated += flops;
            return;
        }
        acc.prepare(row.mask.len(), false);
        for &j in row.mask {
            acc.set_allowed(j);
        }
    }

    let mut evaluated = 0u64;
    for (&k, &uk) in row.u_cols.iter().zip(row.u_vals) {
        let (cols, vals) = b.row(k);
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
    counters.generated += flops;
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
    } else {
        for &j in row.mask {
            if let Some(v) = acc.remove(j) {
                out.push(j, v);
            }
        }
    }
}
