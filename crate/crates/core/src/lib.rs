//! Masked sparse-sparse matrix multiplication, `C = M ⊙ (A·B)` and
//! `C = ¬M ⊙ (A·B)`, on shared-memory multicores.
//!
//! Four push-based (row-by-row Gustavson) kernels differ only in the
//! accumulator that merges scaled rows of `B`: a dense masked sparse
//! accumulator, an open-addressing hash table, a mask-compressed accumulator
//! and a multiway-merge heap. A pull-based kernel computes one sparse dot
//! product per mask entry. Each can run one-phase or with a symbolic pass.

pub mod accum;
pub mod error;
pub mod kernels;
pub mod multiply;
pub mod semiring;
pub mod sparse;

pub use error::{Error, Result};
pub use multiply::{
    masked_multiply, Algorithm, MultiplyOutput, MultiplyPlan, MultiplyStats, Phases, Rhs,
};
pub use semiring::{arithmetic_semiring, plus_pair_semiring, Arithmetic, PlusPair, Semiring};
pub use sparse::{CscMatrix, CsrMatrix, MaskView};
