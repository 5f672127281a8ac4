//! Exact integer and field linear algebra.
//!
//! Matrices are sparse by column (differentials of the complexes built
//! here touch only a handful of rows per generator); Smith normal form
//! densifies only the small presentation core it actually diagonalizes.

mod abelian;
mod matrix;
mod snf;

pub use abelian::{
    exact_at, field_homology_pair, homology_pair, induced_map, subgroup_structure, ClassVector,
    FinAbGroup, HomologyData, InducedMap,
};
pub use matrix::{axpy, IntMatrix, SparseVec};
pub use snf::{hermite_normal_form, kernel_basis, peel_solve, smith_normal_form, SnfResult};

use thiserror::Error;

/// Errors raised by the linear-algebra layer.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("index ({0}, {1}) out of bounds for a {2}x{3} matrix")]
    OutOfBounds(usize, usize, usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("composition of differentials is nonzero at basis column {witness}")]
    CompositionNonzero { witness: usize },
    #[error("map is not a chain map: witness column {witness}")]
    NotChainMap { witness: usize },
    #[error("vector is not in the span (failed at row {row})")]
    NotInSpan { row: usize },
    #[error("resource limit exceeded in {0}")]
    ResourceExhausted(&'static str),
}

#[cfg(test)]
pub(crate) fn big(v: i64) -> num_bigint::BigInt {
    num_bigint::BigInt::from(v)
}
