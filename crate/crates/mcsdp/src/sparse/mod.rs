//! Sparse symmetric pattern machinery and sparse Cholesky: fill-reducing
//! ordering, elimination tree, symbolic factorization producing the
//! extended (chordal) pattern, clique extraction with supernode merging,
//! numeric factorization, and triangular solves.

mod cliques;
mod factor;
mod ordering;
mod pattern;
mod symbolic;

pub use cliques::{extract_cliques, validate_cliques, Clique};
pub use factor::{numeric_factorize, numeric_factorize_pattern, FactorLayout, SparseLowerFactor};
pub use ordering::{fill_reducing_order, EliminationStructure};
pub use pattern::{aggregate_pattern, SymPattern};
pub use symbolic::symbolic_factorize;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SparseError {
    /// The pattern is not chordal with respect to the given elimination
    /// order: some column's higher neighborhood is not contained in its
    /// parent's.
    #[error("pattern is not chordal under the given order (column {0})")]
    NotChordal(usize),
    /// A pivot of the numeric factorization fell below tolerance; the input
    /// is not numerically positive definite on its pattern.
    #[error("matrix is not positive definite (column {0})")]
    NotPositiveDefinite(usize),
}
