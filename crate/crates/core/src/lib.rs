//! Sparse preconditioning via forward factored approximate inverses.
//!
//! The crate computes the FFINV/FFAPINV inverse factors `W A Z = D^-1` of a
//! sparse matrix, derives the incomplete LDU factorization `A ~= L D^-1 U`
//! (ILUFF) from the same sweep, and drives both as right preconditioners
//! inside restarted GMRES. A dense brute-force oracle, M-/H-matrix
//! classification checks and deterministic test-matrix generators support
//! verification of the factorizations' existence properties.

mod clock;
pub mod error;
pub mod fapinv;
pub mod iluff;
pub mod krylov;
pub mod matgen;
pub mod sparse;
pub mod triangle;

pub use error::{Error, Result};
pub use fapinv::{ffinv_scalar, ffinv_vector, CoefficientTrace, DropRule, InverseFactors};
pub use iluff::{iluff_factorize, IlduFactors, PivotMode};
pub use krylov::{
    gmres_right, make_rhs_ones_solution, write_residual_history, GmresConfig, Preconditioner,
    SolveReport,
};
pub use sparse::{
    apply_permutation, matrix_market_string, oracle_limit, read_matrix_market,
    read_matrix_market_from, read_matrix_market_str, read_permutation, read_vector,
    write_matrix_market, write_matrix_market_to, write_vector, ColumnCursorIndex, CsrMatrix,
    DenseMatrix, MMatrixCheck, Permutation,
};
pub use triangle::SparseTriangle;
