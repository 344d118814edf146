//! Sparse semidefinite programming solver based on positive matrix completion.
//!
//! The solver handles the standard primal-dual pair
//!
//! ```text
//! (P)  min  A0 • X   s.t.  Ak • X = bk (k = 1..m),  X ⪰ 0
//! (D)  max  bᵀz      s.t.  Σ Ak zk + Y = A0,        Y ⪰ 0
//! ```
//!
//! where the primal matrix variable is never stored densely. Instead, the
//! aggregate sparsity pattern of the data is extended to a chordal pattern,
//! the primal iterate is kept only on that pattern, and every formula of the
//! interior-point iteration works with the Cholesky factor of the *inverse*
//! of the positive-definite completion. Schur-complement assembly and the
//! primal direction are evaluated column-wise and can fan out to a
//! first-come-first-served worker pool with bitwise-reproducible results.
//!
//! Modules:
//! - [`dense`]: dense symmetric kernels at clique scale.
//! - [`sparse`]: symmetric patterns, ordering, symbolic/numeric sparse Cholesky.
//! - [`chordal`]: chordal structure (cliques, extended pattern) and partial matrices.
//! - [`completion`]: positive matrix completion factorizations.
//! - [`problem`]: SDP data model.
//! - [`generators`]: benchmark problem generators.
//! - [`sdpa`]: SDPA sparse file format reader/writer.
//! - [`scheduler`]: deterministic fork-join column scheduler.
//! - [`solver`]: matrix-completion and dense reference interior-point solvers.

pub mod chordal;
pub mod completion;
pub mod dense;
pub mod generators;
pub mod problem;
pub mod scheduler;
pub mod sdpa;
pub mod solver;
pub mod sparse;
