//! Sparse storage, construction, file I/O and synthetic inputs.

mod csr;
mod generate;
mod mtx;
mod transform;

pub use csr::{CscMatrix, CsrMatrix, MaskView};
pub use generate::{generate, GeneratorSpec, GraphKind, RmatParams, RmatSampler};
pub use mtx::{
    read_matrix_market, read_matrix_market_from, write_matrix_market, write_matrix_market_file,
    write_matrix_market_pattern, MtxValue,
};
pub use transform::{
    degree_sort_relabel, diagonal, invert_permutation, permute_symmetric, simple_graph,
    tril_strict, triu_strict,
};
