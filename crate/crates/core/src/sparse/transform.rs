//! Structural transformations used to prepare graph inputs.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

fn require_square<T>(a: &CsrMatrix<T>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    Ok(())
}

/// Strictly lower triangular part: entries with `col < row`.
pub fn tril_strict<T: Copy>(a: &CsrMatrix<T>) -> Result<CsrMatrix<T>> {
    require_square(a)?;
    Ok(a.filter(|i, j, _| j < i))
}

/// Strictly upper triangular part: entries with `col > row`.
pub fn triu_strict<T: Copy>(a: &CsrMatrix<T>) -> Result<CsrMatrix<T>> {
    require_square(a)?;
    Ok(a.filter(|i, j, _| j > i))
}

pub fn diagonal<T: Copy>(a: &CsrMatrix<T>) -> CsrMatrix<T> {
    a.filter(|i, j, _| i == j)
}

/// Relabels `a` symmetrically: entry `(i, j)` moves to
/// `(new_of_old[i], new_of_old[j])`.
pub fn permute_symmetric<T: Copy>(a: &CsrMatrix<T>, new_of_old: &[usize]) -> Result<CsrMatrix<T>> {
    require_square(a)?;
    let n = a.nrows();
    if new_of_old.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "permutation of length {} for an {n}x{n} matrix",
            new_of_old.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in new_of_old {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidConfig("not a permutation".into()));
        }
    }
    CsrMatrix::from_triples(
        n,
        n,
        a.triples().map(|(i, j, v)| (new_of_old[i], new_of_old[j], v)),
        |x, _| x,
    )
}

/// Inverse of a permutation given as `new_of_old`.
pub fn invert_permutation(new_of_old: &[usize]) -> Vec<usize> {
    let mut old_of_new = vec![0; new_of_old.len()];
    for (old, &new) in new_of_old.iter().enumerate() {
        old_of_new[new] = old;
    }
    old_of_new
}

/// Reorders vertices by non-increasing degree (ties: lower original index
/// first). Returns the relabeled matrix and `new_of_old`.
pub fn degree_sort_relabel<T: Copy>(a: &CsrMatrix<T>) -> Result<(CsrMatrix<T>, Vec<usize>)> {
    require_square(a)?;
    let n = a.nrows();
    let mut old_of_new: Vec<usize> = (0..n).collect();
    old_of_new.sort_by(|&x, &y| a.row_nnz(y).cmp(&a.row_nnz(x)).then(x.cmp(&y)));
    let new_of_old = invert_permutation(&old_of_new);
    let relabeled = permute_symmetric(a, &new_of_old)?;
    Ok((relabeled, new_of_old))
}

/// Simple undirected graph from an arbitrary square pattern: symmetrized,
/// self-loops dropped, duplicates merged. Every stored value is `one`.
pub fn simple_graph<T: Copy, U: Copy>(a: &CsrMatrix<T>, one: U) -> Result<CsrMatrix<U>> {
    require_square(a)?;
    let n = a.nrows();
    let edges = a
        .triples()
        .filter(|&(i, j, _)| i != j)
        .flat_map(|(i, j, _)| [(i, j, one), (j, i, one)]);
    CsrMatrix::from_triples(n, n, edges, |x, _| x)
}
