//! Sparse matrix storage, traversal and ingestion, plus the dense
//! brute-force oracles used for verification.

mod colindex;
mod csr;
mod dense;
mod market;
mod permutation;

pub use colindex::ColumnCursorIndex;
pub use csr::CsrMatrix;
pub use dense::{oracle_limit, DenseMatrix, MMatrixCheck};
pub use market::{
    matrix_market_string, read_matrix_market, read_matrix_market_from, read_matrix_market_str,
    read_permutation, read_vector, write_matrix_market, write_matrix_market_to, write_vector,
};
pub use permutation::{apply_permutation, Permutation};
