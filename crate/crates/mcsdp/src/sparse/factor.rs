//! Numeric sparse Cholesky on a fixed symbolic layout, and triangular
//! solves against the resulting factor.

use std::sync::Arc;

use super::pattern::SymPattern;
use super::SparseError;
use crate::dense::PIVOT_RTOL;

/// Compressed-column layout of a lower-triangular pattern. The diagonal is
/// the first entry of every column and rows are sorted. `row_adj` lists,
/// for every row `i`, the columns `k < i` whose structure contains `i`
/// together with the position of that entry inside column `k`.
#[derive(Debug)]
pub struct FactorLayout {
    dim: usize,
    col_ptr: Vec<usize>,
    rows: Vec<usize>,
    row_ptr: Vec<usize>,
    row_adj: Vec<(usize, usize)>,
}

impl FactorLayout {
    pub fn from_pattern(p: &SymPattern) -> Arc<Self> {
        let n = p.dim();
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut rows = Vec::new();
        col_ptr.push(0);
        for j in 0..n {
            debug_assert_eq!(p.col(j)[0], j, "diagonal must lead each column");
            rows.extend_from_slice(p.col(j));
            col_ptr.push(rows.len());
        }
        let mut row_counts = vec![0usize; n];
        for j in 0..n {
            for &i in &p.col(j)[1..] {
                row_counts[i] += 1;
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + row_counts[i];
        }
        let mut fill = row_ptr.clone();
        let mut row_adj = vec![(0usize, 0usize); row_ptr[n]];
        for j in 0..n {
            for (pos, &i) in p.col(j).iter().enumerate().skip(1) {
                row_adj[fill[i]] = (j, pos);
                fill[i] += 1;
            }
        }
        Arc::new(Self {
            dim: n,
            col_ptr,
            rows,
            row_ptr,
            row_adj,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn col_range(&self, j: usize) -> std::ops::Range<usize> {
        self.col_ptr[j]..self.col_ptr[j + 1]
    }

    #[inline]
    pub fn col_rows(&self, j: usize) -> &[usize] {
        &self.rows[self.col_range(j)]
    }

    #[inline]
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    #[inline]
    pub fn diag_offset(&self, j: usize) -> usize {
        self.col_ptr[j]
    }

    /// Columns `k < i` with an entry in row `i`, as `(column, position)`.
    #[inline]
    pub fn row_adjacency(&self, i: usize) -> &[(usize, usize)] {
        &self.row_adj[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// Offset of position `(i, j)` in the value array, if present.
    pub fn offset_of(&self, i: usize, j: usize) -> Option<usize> {
        debug_assert!(i >= j);
        let range = self.col_range(j);
        self.rows[range.clone()]
            .binary_search(&i)
            .ok()
            .map(|p| range.start + p)
    }

    /// Column index owning a given value offset.
    pub fn col_of_offset(&self, off: usize) -> usize {
        match self.col_ptr.binary_search(&off) {
            Ok(j) => j,
            Err(j) => j - 1,
        }
    }
}

/// Lower-triangular factor with values aligned to a shared layout; the
/// diagonal entries are strictly positive.
#[derive(Debug, Clone)]
pub struct SparseLowerFactor {
    layout: Arc<FactorLayout>,
    values: Vec<f64>,
}

impl SparseLowerFactor {
    /// Wraps values that already form a valid lower-triangular factor on
    /// the layout (strictly positive diagonal).
    pub fn from_values(layout: Arc<FactorLayout>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), layout.nnz());
        debug_assert!((0..layout.dim()).all(|j| values[layout.diag_offset(j)] > 0.0));
        Self { layout, values }
    }

    #[inline]
    pub fn layout(&self) -> &Arc<FactorLayout> {
        &self.layout
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.layout.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.layout.offset_of(i, j).map_or(0.0, |o| self.values[o])
    }

    /// Dense lower-triangular copy, for oracle comparisons in tests.
    pub fn to_dense(&self) -> crate::dense::DenseLowerTriangular {
        let n = self.dim();
        let mut l = crate::dense::DenseLowerTriangular::zeros(n);
        for j in 0..n {
            for off in self.layout.col_range(j) {
                l.set(self.layout.rows[off], j, self.values[off]);
            }
        }
        l
    }

    /// Solves `N Nᵀ x = b` in place. The forward sweep skips columns whose
    /// current value is zero, which also skips any leading zero prefix of a
    /// sparse right-hand side.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.dim());
        let lay = &*self.layout;
        for j in 0..lay.dim {
            if x[j] == 0.0 {
                continue;
            }
            let range = lay.col_range(j);
            let w = x[j] / self.values[range.start];
            x[j] = w;
            for off in range.start + 1..range.end {
                x[lay.rows[off]] -= self.values[off] * w;
            }
        }
        for j in (0..lay.dim).rev() {
            let range = lay.col_range(j);
            let mut s = x[j];
            for off in range.start + 1..range.end {
                s -= self.values[off] * x[lay.rows[off]];
            }
            x[j] = s / self.values[range.start];
        }
    }

    /// Solves `N Nᵀ x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Left-looking sparse Cholesky of a symmetric positive definite matrix
/// whose values are aligned to `layout` (entries present in the layout but
/// structurally zero in the input are simply zero). Fails with the
/// offending column when a pivot drops below the relative tolerance, which
/// doubles as the cone-membership test during the dual line search.
pub fn numeric_factorize(
    layout: &Arc<FactorLayout>,
    input: &[f64],
) -> Result<SparseLowerFactor, SparseError> {
    let n = layout.dim;
    assert_eq!(input.len(), layout.nnz());
    let mut values = vec![0.0; layout.nnz()];
    let mut x = vec![0.0; n];
    let mut max_diag = f64::NEG_INFINITY;
    for j in 0..n {
        max_diag = max_diag.max(input[layout.diag_offset(j)]);
    }
    let tol = PIVOT_RTOL * max_diag.max(0.0);
    for j in 0..n {
        let range = layout.col_range(j);
        for off in range.clone() {
            x[layout.rows[off]] = input[off];
        }
        for &(k, pos) in layout.row_adjacency(j) {
            let krange = layout.col_range(k);
            let ljk = values[krange.start + pos];
            for off in krange.start + pos..krange.end {
                x[layout.rows[off]] -= values[off] * ljk;
            }
        }
        let pivot = x[j];
        if !(pivot > tol) {
            return Err(SparseError::NotPositiveDefinite(j));
        }
        let d = pivot.sqrt();
        values[range.start] = d;
        for off in range.start + 1..range.end {
            values[off] = x[layout.rows[off]] / d;
        }
        for off in range {
            x[layout.rows[off]] = 0.0;
        }
    }
    Ok(SparseLowerFactor {
        layout: Arc::clone(layout),
        values,
    })
}

/// Convenience wrapper factoring values given on a pattern `p` over the
/// factor pattern `e` (with `p ⊆ e`).
pub fn numeric_factorize_pattern(
    p: &SymPattern,
    e: &SymPattern,
    values_on_p: &[((usize, usize), f64)],
) -> Result<SparseLowerFactor, SparseError> {
    assert!(p.is_subset_of(e), "input pattern must be inside the factor pattern");
    let layout = FactorLayout::from_pattern(e);
    let mut input = vec![0.0; layout.nnz()];
    for &((i, j), v) in values_on_p {
        let off = layout
            .offset_of(i.max(j), i.min(j))
            .expect("value outside the factor pattern");
        input[off] = v;
    }
    numeric_factorize(&layout, &input)
}
