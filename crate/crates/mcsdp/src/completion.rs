//! Positive matrix completion.
//!
//! A clique-feasible partial matrix X̄ has a unique positive definite
//! completion X̂ of maximum determinant, characterized by `(X̂⁻¹)_ij = 0`
//! off the extended pattern. Two factored forms of X̂ are provided:
//!
//! - the block form `X̂ = L₁ᵀ L₂ᵀ … D … L₂ L₁` built from per-clique Schur
//!   complements, kept as a verification oracle, and
//! - the Cholesky factor L̂ of the inverse, `X̂⁻¹ = L̂ L̂ᵀ`, whose nonzeros
//!   stay inside the extended pattern. L̂ is assembled clique by clique:
//!   each clique block is reverse-permuted, factored, and the leading
//!   columns of the resulting factor of the block inverse are scattered
//!   into the owned columns.
//!
//! The hot path of the solver uses only L̂; products with X̂ reduce to two
//! triangular solves.

use std::sync::Arc;

use thiserror::Error;

use crate::chordal::{ChordalStructure, PartialMatrix};
use crate::dense::{
    dense_cholesky, triangular_solve, DenseLowerTriangular, DenseSymMatrix, SolveMode,
};
use crate::sparse::{SparseLowerFactor, SymPattern};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompletionError {
    /// A clique block of the partial matrix is not positive definite.
    #[error("clique block {0} is not positive definite")]
    NotPositiveDefinite(usize),
}

/// Block factorization of the completed matrix: per-clique Schur-complement
/// blocks `D[S_r, S_r]` and the wing blocks `W_r = X̄[U_r,U_r]⁻¹ X̄[U_r,S_r]`
/// of the unit lower factors.
#[derive(Debug)]
pub struct LegacyCompletionFactor {
    structure: Arc<ChordalStructure>,
    /// `D[S_r, S_r]`, one per clique.
    blocks: Vec<DenseSymMatrix>,
    /// `|U_r| x |S_r|` row-major wing, absent when the clique shares nothing.
    wings: Vec<Option<Vec<f64>>>,
}

impl LegacyCompletionFactor {
    #[inline]
    pub fn structure(&self) -> &Arc<ChordalStructure> {
        &self.structure
    }

    pub fn block(&self, r: usize) -> &DenseSymMatrix {
        &self.blocks[r]
    }

    pub fn wing(&self, r: usize) -> Option<&[f64]> {
        self.wings[r].as_deref()
    }
}

/// Cholesky factor of the inverse completed matrix: `X̂⁻¹ = L̂ L̂ᵀ` with
/// nonzeros confined to the extended pattern.
#[derive(Debug)]
pub struct InverseCholeskyFactor {
    structure: Arc<ChordalStructure>,
    factor: SparseLowerFactor,
}

impl InverseCholeskyFactor {
    #[inline]
    pub fn structure(&self) -> &Arc<ChordalStructure> {
        &self.structure
    }

    #[inline]
    pub fn factor(&self) -> &SparseLowerFactor {
        &self.factor
    }
}

/// Splits a clique block into the owned/shared sub-blocks and forms the
/// Schur complement `D = X̄[S,S] - X̄[S,U] X̄[U,U]⁻¹ X̄[U,S]` together with
/// the wing `W = X̄[U,U]⁻¹ X̄[U,S]`.
fn clique_schur(
    block: &DenseSymMatrix,
    s_len: usize,
    r: usize,
) -> Result<(DenseSymMatrix, Option<Vec<f64>>), CompletionError> {
    let k = block.dim();
    let u_len = k - s_len;
    // Positive definiteness of the whole clique block is the feasibility
    // condition; check it first so the error carries the clique index.
    dense_cholesky(block).map_err(|_| CompletionError::NotPositiveDefinite(r))?;
    if u_len == 0 {
        let mut d = DenseSymMatrix::zeros(s_len);
        for i in 0..s_len {
            for j in 0..=i {
                d.set(i, j, block.get(i, j));
            }
        }
        return Ok((d, None));
    }
    let mut uu = DenseSymMatrix::zeros(u_len);
    for i in 0..u_len {
        for j in 0..=i {
            uu.set(i, j, block.get(s_len + i, s_len + j));
        }
    }
    let luu = dense_cholesky(&uu).map_err(|_| CompletionError::NotPositiveDefinite(r))?;
    // Wing column by column: W[:, j] = X̄[U,U]⁻¹ X̄[U, S_j].
    let mut wing = vec![0.0; u_len * s_len];
    for j in 0..s_len {
        let rhs: Vec<f64> = (0..u_len).map(|i| block.get(s_len + i, j)).collect();
        let half = triangular_solve(&luu, &rhs, SolveMode::Forward).expect("positive diagonal");
        let col = triangular_solve(&luu, &half, SolveMode::Backward).expect("positive diagonal");
        for i in 0..u_len {
            wing[i * s_len + j] = col[i];
        }
    }
    let mut d = DenseSymMatrix::zeros(s_len);
    for i in 0..s_len {
        for j in 0..=i {
            let mut v = block.get(i, j);
            for t in 0..u_len {
                v -= block.get(s_len + t, i) * wing[t * s_len + j];
            }
            d.set(i, j, v);
        }
    }
    Ok((d, Some(wing)))
}

/// Block factorization of the completion from the clique Schur complements.
pub fn legacy_factorize(x: &PartialMatrix) -> Result<LegacyCompletionFactor, CompletionError> {
    let structure = Arc::clone(x.structure());
    let mut blocks = Vec::with_capacity(structure.cliques().len());
    let mut wings = Vec::with_capacity(structure.cliques().len());
    for (r, clique) in structure.cliques().iter().enumerate() {
        let block = x.clique_block(r);
        let (d, wing) = clique_schur(&block, clique.owned_len(), r)?;
        blocks.push(d);
        wings.push(wing);
    }
    Ok(LegacyCompletionFactor {
        structure,
        blocks,
        wings,
    })
}

/// Applies the completed matrix: `w = X̂ v = L₁ᵀ…L_{ℓ-1}ᵀ D L_{ℓ-1}…L₁ v`,
/// never forming X̂. Each unit factor `L_r` only mixes the shared indices
/// with the owned ones of its clique.
pub fn legacy_apply(f: &LegacyCompletionFactor, v: &[f64]) -> Vec<f64> {
    let s = &f.structure;
    assert_eq!(v.len(), s.n());
    let mut w = v.to_vec();
    // Ascending pass: w <- L_r w, i.e. w[U] += W_rᵀ-shaped mix of w[S].
    for (r, clique) in s.cliques().iter().enumerate() {
        if let Some(wing) = &f.wings[r] {
            let owned = clique.owned();
            let shared = clique.shared();
            for (ui, &u) in shared.iter().enumerate() {
                let mut acc = 0.0;
                for (sj, &sv) in owned.iter().enumerate() {
                    acc += wing[ui * owned.len() + sj] * w[sv];
                }
                w[u] += acc;
            }
        }
    }
    // Block-diagonal D over the owned sets.
    for (r, clique) in s.cliques().iter().enumerate() {
        let owned = clique.owned();
        let local: Vec<f64> = owned.iter().map(|&i| w[i]).collect();
        let out = f.blocks[r].apply(&local);
        for (j, &i) in owned.iter().enumerate() {
            w[i] = out[j];
        }
    }
    // Descending pass: w <- L_rᵀ w, i.e. w[S] += mix of w[U].
    for (r, clique) in s.cliques().iter().enumerate().rev() {
        if let Some(wing) = &f.wings[r] {
            let owned = clique.owned();
            let shared = clique.shared();
            for (sj, &sv) in owned.iter().enumerate() {
                let mut acc = 0.0;
                for (ui, &u) in shared.iter().enumerate() {
                    acc += wing[ui * owned.len() + sj] * w[u];
                }
                w[sv] += acc;
            }
        }
    }
    w
}

/// Builds the Cholesky factor of the inverse completed matrix.
///
/// Per clique `r`: reverse-permute the block, factor it, and write the
/// first `|S_r|` columns of the lower factor of the block inverse into the
/// owned columns of L̂. The owned column ranges are disjoint, so cliques
/// could be processed concurrently; the per-clique work is small enough
/// that this pass stays sequential.
pub fn algorithm1_factorize(x: &PartialMatrix) -> Result<InverseCholeskyFactor, CompletionError> {
    let structure = Arc::clone(x.structure());
    let layout = structure.layout();
    let mut values = vec![0.0; layout.nnz()];
    let mut unit = Vec::new();
    for (r, clique) in structure.cliques().iter().enumerate() {
        let k = clique.len();
        let s_len = clique.owned_len();
        let block = x.clique_block(r);
        // Reversal makes the Cholesky factor of the reversed block yield,
        // after undoing the reversal, the lower factor of the block inverse
        // without ever forming that inverse.
        let reversed = block.reversed();
        let m = dense_cholesky(&reversed).map_err(|_| CompletionError::NotPositiveDefinite(r))?;
        let offsets = structure.block_offsets(r);
        unit.resize(k, 0.0);
        for j in 0..s_len {
            // Column j of P Mᵀ⁻¹ P: solve Mᵀ y = e_{k-1-j}, then reverse.
            unit.iter_mut().for_each(|v| *v = 0.0);
            unit[k - 1 - j] = 1.0;
            let y = triangular_solve(&m, &unit, SolveMode::Backward).expect("positive diagonal");
            let col_base = j * k - (j * j - j) / 2;
            for i in j..k {
                values[offsets[col_base + (i - j)]] = y[k - 1 - i];
            }
        }
    }
    let factor = SparseLowerFactor::from_values(Arc::clone(layout), values);
    Ok(InverseCholeskyFactor { structure, factor })
}

/// Applies the completion through the inverse factor:
/// `X̂ v = L̂⁻ᵀ (L̂⁻¹ v)`, two triangular solves.
pub fn completed_apply(l: &InverseCholeskyFactor, v: &[f64]) -> Vec<f64> {
    l.factor.solve(v)
}

/// In-place variant of [`completed_apply`].
pub fn completed_apply_in_place(l: &InverseCholeskyFactor, v: &mut [f64]) {
    l.factor.solve_in_place(v);
}

/// Maximum absolute value of `(L̂ L̂ᵀ)_ij` over positions off the pattern
/// `e`. For a valid factor this is exactly zero: the factor's nonzeros are
/// confined to `e` and the product of a chordal factor cannot leave it.
pub fn maxdet_kkt_check(l: &InverseCholeskyFactor, e: &SymPattern) -> f64 {
    let layout = l.factor.layout();
    let vals = l.factor.values();
    let mut worst: std::collections::HashMap<(usize, usize), f64> = std::collections::HashMap::new();
    for j in 0..layout.dim() {
        let range = layout.col_range(j);
        let rows = &layout.rows()[range.clone()];
        for (a, &ia) in rows.iter().enumerate() {
            if vals[range.start + a] == 0.0 {
                continue;
            }
            for (b, &ib) in rows.iter().enumerate().take(a + 1) {
                if !e.contains(ia, ib) {
                    *worst.entry((ia, ib)).or_insert(0.0) +=
                        vals[range.start + a] * vals[range.start + b];
                }
            }
        }
    }
    worst.values().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chordal::{ChordalOptions, ChordalStructure};
    use crate::sparse::SymPattern;

    /// Structure for a fixed 3x3 pattern with cliques {0,1} and {1,2}.
    fn two_clique_structure() -> Arc<ChordalStructure> {
        let p = SymPattern::from_pairs(3, [(1, 0), (2, 1)]);
        // Natural order is already a perfect elimination order here and the
        // minimum-degree permutation keeps it; disable coarsening so both
        // cliques survive.
        let s = ChordalStructure::from_aggregate(p, &ChordalOptions {
            merge_fill_limit: 0,
        })
        .unwrap();
        assert_eq!(s.cliques().len(), 2);
        s
    }

    fn example_partial(s: &Arc<ChordalStructure>) -> PartialMatrix {
        // X̄ = [[2,1,.],[1,2,1],[.,1,2]] in original indices, mapped through
        // the permutation.
        let mut x = PartialMatrix::zeros(Arc::clone(s));
        let ip = s.iperm();
        let layout = s.layout();
        let mut set = |i: usize, j: usize, v: f64| {
            let (a, b) = (ip[i].max(ip[j]), ip[i].min(ip[j]));
            let off = layout.offset_of(a, b).unwrap();
            x.values_mut()[off] = v;
        };
        set(0, 0, 2.0);
        set(1, 1, 2.0);
        set(2, 2, 2.0);
        set(0, 1, 1.0);
        set(1, 2, 1.0);
        x
    }

    #[test]
    fn legacy_single_clique_is_the_block_itself() {
        let p = SymPattern::full(3);
        let s = ChordalStructure::from_aggregate(p, &ChordalOptions::default()).unwrap();
        assert_eq!(s.cliques().len(), 1);
        let mut x = PartialMatrix::scaled_identity(Arc::clone(&s), 2.0);
        let off = s.layout().offset_of(1, 0).unwrap();
        x.values_mut()[off] = 0.5;
        let f = legacy_factorize(&x).unwrap();
        assert!(f.wing(0).is_none());
        assert_eq!(f.block(0).get(0, 0), 2.0);
        // Applying reproduces the matrix itself.
        let w = legacy_apply(&f, &[1.0, 0.0, 0.0]);
        assert_eq!(w[0], 2.0);
        assert_eq!(w[1], 0.5);
    }

    #[test]
    fn identity_input_gives_identity_blocks_and_apply() {
        let s = two_clique_structure();
        let x = PartialMatrix::scaled_identity(Arc::clone(&s), 1.0);
        let f = legacy_factorize(&x).unwrap();
        for r in 0..2 {
            if let Some(w) = f.wing(r) {
                assert!(w.iter().all(|&v| v == 0.0));
            }
        }
        let v = vec![1.0, -2.0, 3.0];
        assert_eq!(legacy_apply(&f, &v), v);

        let l = algorithm1_factorize(&x).unwrap();
        assert_eq!(completed_apply(&l, &v), v);
    }

    #[test]
    fn example_schur_complement_value() {
        let s = two_clique_structure();
        let x = example_partial(&s);
        let f = legacy_factorize(&x).unwrap();
        // The clique owning only the first original index has the scalar
        // Schur complement 2 - 1*(1/2)*1 = 1.5.
        let scalar_blocks: Vec<f64> = (0..2)
            .filter(|&r| f.block(r).dim() == 1)
            .map(|r| f.block(r).get(0, 0))
            .collect();
        assert!(scalar_blocks.iter().any(|&v| (v - 1.5).abs() < 1e-14));
    }

    #[test]
    fn completion_fills_missing_entry() {
        let s = two_clique_structure();
        let x = example_partial(&s);
        let f = legacy_factorize(&x).unwrap();
        // X̂ applied to the original third unit vector: the completed entry
        // X̂_02 = X̄_01 X̄_11⁻¹ X̄_12 = 0.5.
        let ip = s.iperm();
        let mut e2 = vec![0.0; 3];
        e2[ip[2]] = 1.0;
        let w = legacy_apply(&f, &e2);
        assert!((w[ip[0]] - 0.5).abs() < 1e-14);
        assert!((w[ip[1]] - 1.0).abs() < 1e-14);
        assert!((w[ip[2]] - 2.0).abs() < 1e-14);

        let l = algorithm1_factorize(&x).unwrap();
        let w2 = completed_apply(&l, &e2);
        for (a, b) in w.iter().zip(w2.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn algorithm1_diagonal_example() {
        let p = SymPattern::diagonal(2);
        let s = ChordalStructure::from_aggregate(p, &ChordalOptions::default()).unwrap();
        let mut x = PartialMatrix::zeros(Arc::clone(&s));
        let d0 = s.layout().diag_offset(s.iperm()[0]);
        let d1 = s.layout().diag_offset(s.iperm()[1]);
        x.values_mut()[d0] = 4.0;
        x.values_mut()[d1] = 9.0;
        let l = algorithm1_factorize(&x).unwrap();
        assert!((l.factor().values()[d0] - 0.5).abs() < 1e-15);
        assert!((l.factor().values()[d1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_factor_reproduces_completed_inverse_entry() {
        let s = two_clique_structure();
        let x = example_partial(&s);
        let l = algorithm1_factorize(&x).unwrap();
        // (L̂L̂ᵀ)⁻¹ must equal the completion; check the filled corner.
        let ip = s.iperm();
        let mut e = vec![0.0; 3];
        e[ip[2]] = 1.0;
        let col = completed_apply(&l, &e);
        assert!((col[ip[0]] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_positive_definite_block_is_reported() {
        let s = two_clique_structure();
        let mut x = example_partial(&s);
        // Break one diagonal entry.
        let off = s.layout().diag_offset(s.iperm()[0]);
        x.values_mut()[off] = -1.0;
        let err = algorithm1_factorize(&x).unwrap_err();
        assert!(matches!(err, CompletionError::NotPositiveDefinite(_)));
        let err = legacy_factorize(&x).unwrap_err();
        assert!(matches!(err, CompletionError::NotPositiveDefinite(_)));
    }

    #[test]
    fn kkt_check_is_structurally_zero_and_detects_corruption() {
        let s = two_clique_structure();
        let x = example_partial(&s);
        let l = algorithm1_factorize(&x).unwrap();
        assert_eq!(maxdet_kkt_check(&l, s.extended()), 0.0);
        // Dense pattern: vacuously zero.
        assert_eq!(maxdet_kkt_check(&l, &SymPattern::full(3)), 0.0);
        // Shrunken pattern: the product now has positions off it.
        let diag_only = SymPattern::diagonal(3);
        assert!(maxdet_kkt_check(&l, &diag_only) > 0.0);
    }
}
