//! Pull-based masked multiply: one sparse dot product per mask entry.

use crate::accum::{Combine, SparseRow};
use crate::sparse::CscMatrix;

/// Dot product of two sorted sparse vectors. Returns `None` when the
/// patterns do not intersect. The second element counts multiplies.
#[inline]
pub(crate) fn sparse_dot<T, C>(
    a_idx: &[usize],
    a_vals: &[T],
    b_idx: &[usize],
    b_vals: &[T],
    combine: &C,
) -> (Option<C::Out>, u64)
where
    T: Copy,
    C: Combine<T>,
{
    let (mut p, mut q) = (0, 0);
    let mut acc: Option<C::Out> = None;
    let mut mults = 0u64;
    while p < a_idx.len() && q < b_idx.len() {
        match a_idx[p].cmp(&b_idx[q]) {
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal => {
                let v = combine.product(a_vals[p], b_vals[q]);
                mults += 1;
                acc = Some(match acc {
                    Some(s) => combine.add(s, v),
                    None => v,
                });
                p += 1;
                q += 1;
            }
        }
    }
    (acc, mults)
}

/// Output row `i` of the pull algorithm: mask entries are visited in order,
/// reusing `A_i*` across the row. Returns the number of multiplies.
pub(crate) fn inner_row<T, C>(
    mask: &[usize],
    u_cols: &[usize],
    u_vals: &[T],
    b: &CscMatrix<T>,
    combine: &C,
    out: &mut SparseRow<C::Out>,
) -> u64
where
    T: Copy,
    C: Combine<T>,
{
    if u_cols.is_empty() {
        return 0;
    }
    let mut mults = 0;
    for &j in mask {
        let (rows, vals) = b.col(j);
        let (v, m) = sparse_dot(u_cols, u_vals, rows, vals, combine);
        mults += m;
        if let Some(v) = v {
            out.push(j, v);
        }
    }
    mults
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accum::{Numeric, Symbolic};
    use crate::semiring::arithmetic_semiring;

    #[test]
    fn dot_products() {
        let c = Numeric(arithmetic_semiring::<i64>());
        assert_eq!(sparse_dot(&[0, 2, 5], &[1, 2, 3], &[2, 5, 7], &[10, 100, 1000], &c), (Some(320), 2));
        assert_eq!(sparse_dot(&[0, 2], &[1, 2], &[1, 3], &[1, 1], &c), (None, 0));
        assert_eq!(sparse_dot::<i64, _>(&[], &[], &[1], &[1], &c), (None, 0));
        assert_eq!(sparse_dot(&[4], &[1], &[4], &[1], &Symbolic), (Some(()), 1));
    }

    #[test]
    fn cancellation_is_still_present() {
        let c = Numeric(arithmetic_semiring::<i64>());
        assert_eq!(sparse_dot(&[0, 1], &[1, 1], &[0, 1], &[1, -1], &c), (Some(0), 2));
    }
}
