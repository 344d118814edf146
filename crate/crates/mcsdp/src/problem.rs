//! SDP data model: sparse symmetric coefficient matrices and the
//! standard-form problem `min A0 • X s.t. Ak • X = bk, X ⪰ 0`.

use crate::dense::DenseSymMatrix;

/// Sparse symmetric matrix stored column-wise with both triangles present,
/// rows sorted within each column. Entries with value exactly zero are
/// dropped on construction, so stored entries coincide with structural
/// nonzeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMat {
    dim: usize,
    cols: Vec<Vec<(usize, f64)>>,
    nonzero_cols: Vec<usize>,
}

impl SparseSymMat {
    /// Builds from lower-triangle triplets `(i, j, v)` with `i >= j`; each
    /// off-diagonal triplet stands for the symmetric pair.
    pub fn from_lower_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        for &(i, j, v) in triplets {
            assert!(i < dim && j <= i, "bad triplet ({i},{j}) for dim {dim}");
            if v == 0.0 {
                continue;
            }
            cols[j].push((i, v));
            if i != j {
                cols[i].push((j, v));
            }
        }
        for col in cols.iter_mut() {
            col.sort_unstable_by_key(|e| e.0);
            debug_assert!(col.windows(2).all(|w| w[0].0 != w[1].0), "duplicate entry");
        }
        let nonzero_cols = (0..dim).filter(|&j| !cols[j].is_empty()).collect();
        Self {
            dim,
            cols,
            nonzero_cols,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_lower_triplets(dim, &[])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Columns that contain at least one nonzero, ascending.
    #[inline]
    pub fn nonzero_cols(&self) -> &[usize] {
        &self.nonzero_cols
    }

    /// Entries `(row, value)` of column `k`, both triangles.
    #[inline]
    pub fn col(&self, k: usize) -> &[(usize, f64)] {
        &self.cols[k]
    }

    pub fn is_empty(&self) -> bool {
        self.nonzero_cols.is_empty()
    }

    /// Stored entry count over both triangles.
    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.cols
            .iter()
            .flatten()
            .fold(0.0, |m, &(_, v)| m.max(v.abs()))
    }

    /// Lower-triangle triplets `(i, j, v)` with `i >= j`, sorted by `(j, i)`.
    pub fn lower_triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for j in 0..self.dim {
            for &(i, v) in &self.cols[j] {
                if i >= j {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    /// All stored entries `(i, j, v)`, both triangles.
    pub fn full_triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |&(i, v)| (i, j, v)))
    }

    /// Relabels indices by `iperm` (old index -> new index).
    pub fn permuted(&self, iperm: &[usize]) -> Self {
        let triplets: Vec<(usize, usize, f64)> = self
            .lower_triplets()
            .into_iter()
            .map(|(i, j, v)| {
                let (a, b) = (iperm[i], iperm[j]);
                if a >= b {
                    (a, b, v)
                } else {
                    (b, a, v)
                }
            })
            .collect();
        Self::from_lower_triplets(self.dim, &triplets)
    }

    /// `self • x` for a dense symmetric matrix.
    pub fn bullet_dense(&self, x: &DenseSymMatrix) -> f64 {
        self.full_triplets().map(|(i, j, v)| v * x.get(i, j)).sum()
    }

    /// `vᵀ A w` using the stored entries.
    pub fn quadratic_form(&self, v: &[f64], w: &[f64]) -> f64 {
        self.full_triplets()
            .map(|(i, j, val)| val * v[i] * w[j])
            .sum()
    }

    /// Dense copy.
    pub fn to_dense(&self) -> DenseSymMatrix {
        let mut a = DenseSymMatrix::zeros(self.dim);
        for (i, j, v) in self.full_triplets() {
            if i >= j {
                a.set(i, j, v);
            }
        }
        a
    }
}

/// Standard-form SDP data: `mats[0]` is the objective matrix `A0`,
/// `mats[1..]` are the `m` constraint matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub n: usize,
    pub m: usize,
    mats: Vec<SparseSymMat>,
    pub b: Vec<f64>,
}

impl SdpProblem {
    pub fn new(n: usize, mats: Vec<SparseSymMat>, b: Vec<f64>) -> Self {
        assert!(n >= 1, "matrix dimension must be positive");
        assert!(!b.is_empty(), "at least one constraint is required");
        assert_eq!(mats.len(), b.len() + 1, "need m constraint matrices and A0");
        for a in &mats {
            assert_eq!(a.dim(), n, "coefficient matrix dimension mismatch");
        }
        let m = b.len();
        Self { n, m, mats, b }
    }

    /// Objective matrix `A0`.
    #[inline]
    pub fn objective(&self) -> &SparseSymMat {
        &self.mats[0]
    }

    /// Constraint matrix `Ak`, `k` in `0..m`.
    #[inline]
    pub fn constraint(&self, k: usize) -> &SparseSymMat {
        &self.mats[k + 1]
    }

    /// All matrices `A0..Am`.
    #[inline]
    pub fn matrices(&self) -> &[SparseSymMat] {
        &self.mats
    }

    /// Relabels all coefficient matrices by `iperm` (old -> new).
    pub fn permuted(&self, iperm: &[usize]) -> Self {
        let mats = self.mats.iter().map(|a| a.permuted(iperm)).collect();
        Self::new(self.n, mats, self.b.clone())
    }

    /// Largest data magnitude, used to scale the initial point.
    pub fn data_scale(&self) -> f64 {
        let b_max = self.b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let a_max = self.mats.iter().fold(0.0f64, |m, a| m.max(a.max_abs()));
        b_max.max(a_max).max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirrors_offdiagonal_entries() {
        let a = SparseSymMat::from_lower_triplets(3, &[(2, 0, 1.5), (1, 1, 2.0)]);
        assert_eq!(a.col(0), &[(2, 1.5)]);
        assert_eq!(a.col(2), &[(0, 1.5)]);
        assert_eq!(a.col(1), &[(1, 2.0)]);
        assert_eq!(a.nonzero_cols(), &[0, 1, 2]);
        assert_eq!(a.nnz(), 3);
    }

    #[test]
    fn drops_explicit_zeros() {
        let a = SparseSymMat::from_lower_triplets(2, &[(1, 0, 0.0)]);
        assert!(a.is_empty());
    }

    #[test]
    fn permutation_relabels() {
        let a = SparseSymMat::from_lower_triplets(3, &[(2, 0, 1.0)]);
        let p = a.permuted(&[2, 1, 0]);
        assert_eq!(p.lower_triplets(), vec![(2, 0, 1.0)]);
        let q = a.permuted(&[1, 0, 2]);
        assert_eq!(q.lower_triplets(), vec![(2, 1, 1.0)]);
    }

    #[test]
    fn bullet_and_quadratic_form() {
        let a = SparseSymMat::from_lower_triplets(2, &[(1, 0, 2.0), (0, 0, 1.0)]);
        let mut x = DenseSymMatrix::zeros(2);
        x.set(0, 0, 3.0);
        x.set(1, 0, 4.0);
        // 1*3 + 2*4 + 2*4 = 19
        assert_eq!(a.bullet_dense(&x), 19.0);
        assert_eq!(a.quadratic_form(&[1.0, 1.0], &[1.0, 1.0]), 5.0);
    }
}
