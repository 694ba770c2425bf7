//! Compressed row/column storage and the pattern-only mask view.
//!
//! Every public constructor produces canonical form: columns strictly
//! increasing inside each row, no duplicates.

use crate::error::{Error, Result};

/// Compressed sparse row matrix in canonical (sorted, deduplicated) form.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

/// Compressed sparse column matrix; the column-major mirror of [`CsrMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix<T> {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<T>,
}

fn check_compressed(
    outer: usize,
    inner: usize,
    ptr: &[usize],
    idx: &[usize],
    nvals: usize,
) -> Result<()> {
    if ptr.len() != outer + 1 {
        return Err(Error::InvalidStructure(format!(
            "pointer array has length {}, expected {}",
            ptr.len(),
            outer + 1
        )));
    }
    if ptr[0] != 0 {
        return Err(Error::InvalidStructure("pointer array must start at 0".into()));
    }
    if ptr[outer] != idx.len() || idx.len() != nvals {
        return Err(Error::InvalidStructure(format!(
            "pointer array ends at {}, but {} indices and {} values are stored",
            ptr[outer],
            idx.len(),
            nvals
        )));
    }
    for w in ptr.windows(2) {
        if w[0] > w[1] {
            return Err(Error::InvalidStructure("pointer array is decreasing".into()));
        }
        let lane = &idx[w[0]..w[1]];
        if let Some(&last) = lane.last() {
            if last >= inner {
                return Err(Error::InvalidStructure(format!(
                    "index {last} out of range (dimension {inner})"
                )));
            }
        }
        if lane.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidStructure(
                "indices must be strictly increasing within each row/column".into(),
            ));
        }
    }
    Ok(())
}

impl<T: Copy> CsrMatrix<T> {
    /// Builds a canonical matrix from `(row, col, value)` triples, folding
    /// duplicate coordinates with `dedup` in input order.
    pub fn from_triples<I, F>(nrows: usize, ncols: usize, triples: I, dedup: F) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, T)>,
        F: Fn(T, T) -> T,
    {
        let triples: Vec<(usize, usize, T)> = triples.into_iter().collect();
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in &triples {
            if r >= nrows || c >= ncols {
                return Err(Error::IndexOutOfRange {
                    row: r,
                    col: c,
                    nrows,
                    ncols,
                });
            }
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut slots: Vec<Option<(usize, T)>> = vec![None; triples.len()];
        for (r, c, v) in triples {
            slots[next[r]] = Some((c, v));
            next[r] += 1;
        }
        let mut entries: Vec<(usize, T)> = slots.into_iter().map(|s| s.unwrap()).collect();

        let mut row_ptr = Vec::with_capacity(nrows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for i in 0..nrows {
            let row = &mut entries[counts[i]..counts[i + 1]];
            // stable, so duplicates fold in input order
            row.sort_by_key(|&(c, _)| c);
            let start = col_idx.len();
            for &(c, v) in row.iter() {
                if col_idx.len() > start && *col_idx.last().unwrap() == c {
                    let last = values.last_mut().unwrap();
                    *last = dedup(*last, v);
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Validates already-compressed arrays. They must be canonical.
    pub fn from_raw_parts(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<T>,
    ) -> Result<Self> {
        check_compressed(nrows, ncols, &row_ptr, &col_idx, values.len())?;
        Ok(CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub(crate) fn from_parts_unchecked(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<T>,
    ) -> Self {
        debug_assert!(check_compressed(nrows, ncols, &row_ptr, &col_idx, values.len()).is_ok());
        CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn empty(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize, one: T) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![one; n],
        }
    }

    pub fn to_csc(&self) -> CscMatrix<T> {
        let (col_ptr, row_idx, values) = transpose_compressed(
            self.nrows,
            self.ncols,
            &self.row_ptr,
            &self.col_idx,
            &self.values,
        );
        CscMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn transpose(&self) -> CsrMatrix<T> {
        let (row_ptr, col_idx, values) = transpose_compressed(
            self.nrows,
            self.ncols,
            &self.row_ptr,
            &self.col_idx,
            &self.values,
        );
        CsrMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> CsrMatrix<U> {
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Keeps the entries for which `keep(row, col, value)` holds.
    pub fn filter(&self, keep: impl Fn(usize, usize, T) -> bool) -> CsrMatrix<T> {
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if keep(i, j, v) {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Pattern-only copy.
    pub fn pattern(&self) -> CsrMatrix<()> {
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: vec![(); self.col_idx.len()],
        }
    }

    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> Option<T> {
        let (cols, vals) = self.row(row);
        cols.binary_search(&col).ok().map(|p| vals[p])
    }

    /// Whether the pattern equals the pattern of its transpose.
    pub fn is_pattern_symmetric(&self) -> bool {
        self.nrows == self.ncols && {
            let t = self.transpose();
            t.row_ptr == self.row_ptr && t.col_idx == self.col_idx
        }
    }
}

impl<T> CsrMatrix<T> {
    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    #[inline]
    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    #[inline]
    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn into_parts(self) -> (Vec<usize>, Vec<usize>, Vec<T>) {
        (self.row_ptr, self.col_idx, self.values)
    }

    /// Mask over this matrix's pattern.
    pub fn mask(&self) -> MaskView<'_> {
        MaskView {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: &self.row_ptr,
            col_idx: &self.col_idx,
            complemented: false,
        }
    }
}

impl<T: Copy> CscMatrix<T> {
    pub fn from_raw_parts(
        nrows: usize,
        ncols: usize,
        col_ptr: Vec<usize>,
        row_idx: Vec<usize>,
        values: Vec<T>,
    ) -> Result<Self> {
        check_compressed(ncols, nrows, &col_ptr, &row_idx, values.len())?;
        Ok(CscMatrix {
            nrows,
            ncols,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn to_csr(&self) -> CsrMatrix<T> {
        let (row_ptr, col_idx, values) = transpose_compressed(
            self.ncols,
            self.nrows,
            &self.col_ptr,
            &self.row_idx,
            &self.values,
        );
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl<T> CscMatrix<T> {
    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    #[inline]
    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    #[inline]
    pub fn row_idx(&self) -> &[usize] {
        &self.row_idx
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Row indices and values of column `j`.
    #[inline]
    pub fn col(&self, j: usize) -> (&[usize], &[T]) {
        let span = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[span.clone()], &self.values[span])
    }
}

/// Counting-sort transpose of compressed arrays. Output lanes come out sorted
/// because source lanes are visited in order.
fn transpose_compressed<T: Copy>(
    outer: usize,
    inner: usize,
    ptr: &[usize],
    idx: &[usize],
    vals: &[T],
) -> (Vec<usize>, Vec<usize>, Vec<T>) {
    let nnz = idx.len();
    let mut tptr = vec![0usize; inner + 1];
    for &j in idx {
        tptr[j + 1] += 1;
    }
    for j in 0..inner {
        tptr[j + 1] += tptr[j];
    }
    let mut next = tptr.clone();
    let mut tidx = vec![0usize; nnz];
    let mut tvals: Vec<T> = Vec::with_capacity(nnz);
    let mut order = vec![0usize; nnz];
    for i in 0..outer {
        for p in ptr[i]..ptr[i + 1] {
            let j = idx[p];
            let q = next[j];
            tidx[q] = i;
            order[q] = p;
            next[j] += 1;
        }
    }
    tvals.extend(order.iter().map(|&p| vals[p]));
    (tptr, tidx, tvals)
}

/// Pattern-only view of a mask matrix plus the complement flag.
#[derive(Debug, Clone, Copy)]
pub struct MaskView<'a> {
    nrows: usize,
    ncols: usize,
    row_ptr: &'a [usize],
    col_idx: &'a [usize],
    complemented: bool,
}

impl<'a> MaskView<'a> {
    pub fn from_parts(
        nrows: usize,
        ncols: usize,
        row_ptr: &'a [usize],
        col_idx: &'a [usize],
        complemented: bool,
    ) -> Result<Self> {
        check_compressed(nrows, ncols, row_ptr, col_idx, col_idx.len())?;
        Ok(MaskView {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            complemented,
        })
    }

    pub fn with_complement(self, complemented: bool) -> Self {
        MaskView {
            complemented,
            ..self
        }
    }

    /// Same pattern with the complement flag flipped.
    pub fn complement(self) -> Self {
        self.with_complement(!self.complemented)
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    #[inline]
    pub fn is_complemented(&self) -> bool {
        self.complemented
    }

    #[inline]
    pub fn row(&self, i: usize) -> &'a [usize] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// Whether position `(i, j)` may appear in the output.
    pub fn admits(&self, i: usize, j: usize) -> bool {
        self.row(i).binary_search(&j).is_ok() != self.complemented
    }
}
