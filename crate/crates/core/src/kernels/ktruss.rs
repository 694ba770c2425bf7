use super::{require_simple_symmetric, KernelTrace};
use crate::error::{Error, Result};
use crate::multiply::{masked_multiply_auto, MultiplyPlan};
use crate::semiring::plus_pair_semiring;
use crate::sparse::CsrMatrix;

pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone)]
pub struct KTruss {
    /// Surviving edges (symmetric, every value 1).
    pub graph: CsrMatrix<i64>,
    /// Support computations performed, including the final one that
    /// confirmed the fixed point.
    pub iterations: usize,
    pub trace: KernelTrace,
}

/// Repeatedly computes edge support `S = G ⊙ (G·G)` and drops every edge
/// with fewer than `k − 2` supporting triangles until nothing changes.
pub fn k_truss<T: Copy>(g: &CsrMatrix<T>, k: usize, plan: &MultiplyPlan) -> Result<KTruss> {
    if k < 3 {
        return Err(Error::InvalidConfig(format!("k-truss needs k >= 3, got {k}")));
    }
    require_simple_symmetric(g)?;
    plan.check(false)?;
    let need = (k - 2) as i64;
    let mut cur = g.filter(|i, j, _| i != j).map(|_| 1i64);
    let mut trace = KernelTrace::default();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let support = masked_multiply_auto(cur.mask(), &cur, &cur, plan, plus_pair_semiring::<i64>())?;
        trace.push(support.stats);
        let next = prune(&cur, &support.matrix, need);
        if next.nnz() == cur.nnz() {
            return Ok(KTruss {
                graph: cur,
                iterations,
                trace,
            });
        }
        cur = next;
    }
}

/// Keeps the edges of `g` whose support is at least `need`. The pattern of
/// `support` is contained in that of `g`.
fn prune(g: &CsrMatrix<i64>, support: &CsrMatrix<i64>, need: i64) -> CsrMatrix<i64> {
    let mut row_ptr = Vec::with_capacity(g.nrows() + 1);
    row_ptr.push(0);
    let mut col_idx = Vec::new();
    for i in 0..g.nrows() {
        let (s_cols, s_vals) = support.row(i);
        col_idx.extend(
            s_cols
                .iter()
                .zip(s_vals)
                .filter(|&(_, &s)| s >= need)
                .map(|(&j, _)| j),
        );
        row_ptr.push(col_idx.len());
    }
    let values = vec![1i64; col_idx.len()];
    CsrMatrix::from_parts_unchecked(g.nrows(), g.ncols(), row_ptr, col_idx, values)
}
