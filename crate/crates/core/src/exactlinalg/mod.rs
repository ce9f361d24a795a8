//! Exact scalars, sparse matrices and cohomology of finite cochain complexes.

mod complex;
mod matrix;
mod scalar;

pub use complex::{
    check_chain_map, cohomology_dims, cohomology_dims_in, cone, is_quasi_iso, ChainMap, Cohomology,
    ComplexError, Dim, GradedComplex,
};
pub use matrix::{independent_columns, kernel_basis, rank, rank_in, select_columns, solve, SparseMatrix};
pub use scalar::{Field, Scalar, DEFAULT_PRIME};
