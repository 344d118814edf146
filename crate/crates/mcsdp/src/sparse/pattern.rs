//! Symmetric sparsity patterns stored as the lower triangle.

use crate::problem::SdpProblem;

/// Sparsity pattern of a symmetric matrix. Only positions `(i, j)` with
/// `i >= j` are stored; the diagonal is always present. Row indices within
/// each column are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymPattern {
    dim: usize,
    cols: Vec<Vec<usize>>,
}

impl SymPattern {
    /// Diagonal-only pattern.
    pub fn diagonal(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            dim,
            cols: (0..dim).map(|j| vec![j]).collect(),
        }
    }

    /// Builds from pairs `(i, j)` in any order and either triangle; the
    /// diagonal is added automatically.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut p = Self::diagonal(dim);
        for (a, b) in pairs {
            assert!(a < dim && b < dim, "index out of range");
            let (i, j) = if a >= b { (a, b) } else { (b, a) };
            p.cols[j].push(i);
        }
        for col in p.cols.iter_mut() {
            col.sort_unstable();
            col.dedup();
        }
        p
    }

    pub fn full(dim: usize) -> Self {
        Self::from_pairs(dim, (0..dim).flat_map(|j| (j..dim).map(move |i| (i, j))))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sorted rows `>= j` of column `j`, diagonal first.
    #[inline]
    pub fn col(&self, j: usize) -> &[usize] {
        &self.cols[j]
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        let (i, j) = if a >= b { (a, b) } else { (b, a) };
        self.cols[j].binary_search(&i).is_ok()
    }

    /// Number of stored (lower-triangle) positions, diagonal included.
    pub fn nnz_lower(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    /// Number of positions of the full symmetric pattern.
    pub fn full_count(&self) -> usize {
        2 * self.nnz_lower() - self.dim
    }

    /// Lower-triangle positions `(i, j)` with `i >= j`.
    pub fn lower_iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |&i| (i, j)))
    }

    pub fn is_subset_of(&self, other: &SymPattern) -> bool {
        self.dim == other.dim && self.lower_iter().all(|(i, j)| other.contains(i, j))
    }

    /// Relabels positions by `iperm` (old index -> new index).
    pub fn permuted(&self, iperm: &[usize]) -> SymPattern {
        assert_eq!(iperm.len(), self.dim);
        Self::from_pairs(self.dim, self.lower_iter().map(|(i, j)| (iperm[i], iperm[j])))
    }
}

/// Union of the structural nonzero positions of `A0..Am` plus the full
/// diagonal: the only positions where the dual slack matrix can be nonzero.
pub fn aggregate_pattern(problem: &SdpProblem) -> SymPattern {
    SymPattern::from_pairs(
        problem.n,
        problem.matrices().iter().flat_map(|a| {
            a.lower_triplets()
                .into_iter()
                .map(|(i, j, _)| (i, j))
                .collect::<Vec<_>>()
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{lattice_graph, maxcut_sdp, unit_weights};
    use crate::problem::SparseSymMat;

    #[test]
    fn diagonal_aggregate() {
        let diag =
            |v: f64| SparseSymMat::from_lower_triplets(3, &[(0, 0, v), (1, 1, v), (2, 2, v)]);
        let p = SdpProblem::new(3, vec![diag(1.0), diag(2.0), diag(3.0)], vec![1.0, 2.0]);
        let agg = aggregate_pattern(&p);
        assert_eq!(agg, SymPattern::diagonal(3));
    }

    #[test]
    fn maxcut_lattice_aggregate_is_adjacency_plus_diagonal() {
        let g = lattice_graph(4, 3);
        let w = unit_weights(g.graph());
        let prob = maxcut_sdp(g.graph(), &w);
        let agg = aggregate_pattern(&prob);
        // (p-1)q + p(q-1) = 9 + 8 = 17 edges.
        assert_eq!(agg.dim(), 12);
        assert_eq!(agg.nnz_lower(), 12 + 17);
        for &(a, b) in g.graph().edges() {
            assert!(agg.contains(a, b));
        }
    }

    #[test]
    fn single_offdiagonal_entry() {
        let a0 = SparseSymMat::from_lower_triplets(6, &[(4, 1, 2.5)]);
        let a1 = SparseSymMat::from_lower_triplets(6, &[(0, 0, 1.0)]);
        let p = SdpProblem::new(6, vec![a0, a1], vec![1.0]);
        let agg = aggregate_pattern(&p);
        assert_eq!(agg.nnz_lower(), 6 + 1);
        assert!(agg.contains(4, 1));
        assert!(agg.contains(1, 4));
        assert!(!agg.contains(4, 2));
    }

    #[test]
    fn permutation_relabels_positions() {
        let p = SymPattern::from_pairs(3, [(2, 0)]);
        let q = p.permuted(&[2, 1, 0]);
        assert!(q.contains(2, 0));
        let r = p.permuted(&[1, 2, 0]);
        assert!(r.contains(1, 0));
        assert!(!r.contains(2, 0));
    }
}
