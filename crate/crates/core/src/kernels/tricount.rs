use super::{require_simple_symmetric, KernelTrace};
use crate::error::Result;
use crate::multiply::{masked_multiply_auto, MultiplyPlan};
use crate::semiring::plus_pair_semiring;
use crate::sparse::{degree_sort_relabel, tril_strict, CsrMatrix};

#[derive(Debug, Clone)]
pub struct TriangleCount {
    pub triangles: u64,
    pub trace: KernelTrace,
}

/// Counts triangles as `sum(L ⊙ (L·L))`, where `L` is the strictly lower
/// triangle of the graph after relabeling vertices by non-increasing degree.
/// Self-loops are ignored.
pub fn triangle_count<T: Copy>(g: &CsrMatrix<T>, plan: &MultiplyPlan) -> Result<TriangleCount> {
    require_simple_symmetric(g)?;
    plan.check(false)?;
    let (relabeled, _) = degree_sort_relabel(&g.map(|_| 1i64))?;
    let l = tril_strict(&relabeled)?;
    let out = masked_multiply_auto(l.mask(), &l, &l, plan, plus_pair_semiring::<i64>())?;
    let triangles = out.matrix.values().iter().map(|&v| v as u64).sum();
    let mut trace = KernelTrace::default();
    trace.push(out.stats);
    Ok(TriangleCount { triangles, trace })
}
