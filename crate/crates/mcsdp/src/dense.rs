//! Dense symmetric linear algebra at clique scale.
//!
//! Everything here operates on small dense blocks: Cholesky factorization,
//! triangular solves, symmetric eigenvalues via Jacobi sweeps, and the
//! reversal permutation used when factoring the inverse of a clique block.

use thiserror::Error;

use crate::scheduler;

/// Relative pivot tolerance for Cholesky: a pivot is rejected when it is
/// `<= PIVOT_RTOL * max_diagonal`. Keeps the positive-definiteness test
/// scale invariant.
pub const PIVOT_RTOL: f64 = 1e-13;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DenseError {
    /// A Cholesky pivot fell below the relative tolerance; the matrix is not
    /// numerically positive definite. Carries the offending pivot index.
    #[error("matrix is not positive definite (pivot {0})")]
    NotPositiveDefinite(usize),
    /// A triangular factor has an exactly zero diagonal entry.
    #[error("zero diagonal entry at index {0}")]
    ZeroDiagonal(usize),
    /// The Jacobi eigenvalue iteration did not converge within the sweep cap.
    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
}

/// Symmetric matrix with full square storage; the lower triangle is
/// authoritative and `set` mirrors into the upper triangle so both halves
/// always agree.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl DenseSymMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, scale: f64) -> Self {
        let mut a = Self::zeros(dim);
        for i in 0..dim {
            a.data[i * dim + i] = scale;
        }
        a
    }

    /// Builds from full rows; the strict upper triangle is ignored and
    /// mirrored from the lower one.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let mut a = Self::zeros(dim);
        for i in 0..dim {
            assert_eq!(rows[i].len(), dim, "row {i} has wrong length");
            for j in 0..=i {
                a.set(i, j, rows[i][j]);
            }
        }
        a
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets the (i, j) and (j, i) entries.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Full inner product `self • other = Σ_ij a_ij b_ij`.
    pub fn dot(&self, other: &DenseSymMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![0.0; self.dim];
        for i in 0..self.dim {
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            out[i] = row.iter().zip(v).map(|(a, x)| a * x).sum();
        }
        out
    }

    /// Copy with rows and columns in reversed order.
    pub fn reversed(&self) -> DenseSymMatrix {
        let n = self.dim;
        let mut r = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                r.set(i, j, self.get(n - 1 - i, n - 1 - j));
            }
        }
        r
    }
}

/// Lower triangular matrix with full square storage; entries above the
/// diagonal are structurally zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLowerTriangular {
    dim: usize,
    data: Vec<f64>,
}

impl DenseLowerTriangular {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut l = Self::zeros(dim);
        for i in 0..dim {
            l.data[i * dim + i] = 1.0;
        }
        l
    }

    /// Builds from full rows; entries above the diagonal must be zero.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let mut l = Self::zeros(dim);
        for i in 0..dim {
            assert_eq!(rows[i].len(), dim, "row {i} has wrong length");
            for j in 0..dim {
                if j > i {
                    assert_eq!(rows[i][j], 0.0, "entry ({i},{j}) above the diagonal");
                } else {
                    l.data[i * dim + j] = rows[i][j];
                }
            }
        }
        l
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(j <= i, "cannot set entry above the diagonal");
        self.data[i * self.dim + j] = v;
    }

    /// `L Lᵀ` as a symmetric matrix.
    pub fn reconstruct(&self) -> DenseSymMatrix {
        let n = self.dim;
        let mut a = DenseSymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = 0.0;
                for k in 0..=j {
                    s += self.get(i, k) * self.get(j, k);
                }
                a.set(i, j, s);
            }
        }
        a
    }
}

/// Which triangular system to solve. The factor argument is always lower
/// triangular; the `*Transpose` modes request the transposed system and are
/// aliases for the opposite sweep (`ForwardTranspose` ≡ `Backward`,
/// `BackwardTranspose` ≡ `Forward`). They exist for callers whose factor
/// semantically represents an upper-triangular matrix stored as its
/// transpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// Solve `L x = b` by forward substitution.
    Forward,
    /// Solve `Lᵀ x = b` by backward substitution.
    Backward,
    /// Solve `Lᵀ x = b`.
    ForwardTranspose,
    /// Solve `L x = b`.
    BackwardTranspose,
}

/// Cholesky factorization `A = M Mᵀ` of a symmetric positive definite matrix.
///
/// Fails with [`DenseError::NotPositiveDefinite`] when a pivot drops to
/// `PIVOT_RTOL` times the largest diagonal entry, which the interior-point
/// driver uses as the cone-membership test.
pub fn dense_cholesky(a: &DenseSymMatrix) -> Result<DenseLowerTriangular, DenseError> {
    dense_cholesky_threaded(a, 1)
}

/// Cholesky factorization with a worker budget for the trailing update.
///
/// The result is bitwise identical for every `threads` value: each target
/// column is updated by exactly one worker and the per-entry operation order
/// never depends on the partitioning. The effective worker count is clamped
/// to 1 while a scheduler column phase is active on the calling thread.
pub fn dense_cholesky_threaded(
    a: &DenseSymMatrix,
    threads: usize,
) -> Result<DenseLowerTriangular, DenseError> {
    let n = a.dim;
    let threads = scheduler::effective_inner_threads(threads);
    // Packed lower storage: column c holds rows c..n contiguously.
    let offset = |c: usize| c * n - c * (c - 1) / 2;
    let mut work = vec![0.0; offset(n)];
    let mut max_diag: f64 = f64::NEG_INFINITY;
    for c in 0..n {
        let base = offset(c);
        for i in c..n {
            work[base + i - c] = a.get(i, c);
        }
        max_diag = max_diag.max(a.get(c, c));
    }
    let tol = PIVOT_RTOL * max_diag.max(0.0);

    const PANEL: usize = 32;
    let mut pb = 0;
    while pb < n {
        let pe = (pb + PANEL).min(n);
        // Factor the panel columns in place.
        for j in pb..pe {
            for k in pb..j {
                let lkj = work[offset(k) + j - k];
                let (head, tail) = work.split_at_mut(offset(j));
                let src = &head[offset(k) + j - k..offset(k) + n - k];
                let dst = &mut tail[..n - j];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d -= lkj * s;
                }
            }
            let base = offset(j);
            let pivot = work[base];
            if !(pivot > tol) {
                return Err(DenseError::NotPositiveDefinite(j));
            }
            let d = pivot.sqrt();
            work[base] = d;
            for v in work[base + 1..base + n - j].iter_mut() {
                *v /= d;
            }
        }
        // Trailing update: subtract the panel's contribution from every
        // column to the right. Columns are disjoint, so the update can be
        // chunked across workers without changing any arithmetic.
        if pe < n {
            let (panel, trail) = work.split_at_mut(offset(pe));
            let trail_base = offset(pe);
            let update_cols = |cols: std::ops::Range<usize>, buf: &mut [f64], buf_base: usize| {
                for c in cols {
                    let cb = offset(c) - buf_base;
                    for k in pb..pe {
                        let kb = offset(k);
                        let lck = panel[kb + c - k];
                        let src = &panel[kb + c - k..kb + n - k];
                        let dst = &mut buf[cb..cb + n - c];
                        for (d, s) in dst.iter_mut().zip(src) {
                            *d -= lck * s;
                        }
                    }
                }
            };
            if threads <= 1 || n - pe < 2 * threads {
                update_cols(pe..n, trail, trail_base);
            } else {
                // Split the trailing columns into contiguous chunks of
                // roughly equal flop count.
                let total_cost: usize = (pe..n).map(|c| n - c).sum();
                let per_chunk = total_cost.div_ceil(threads);
                let mut bounds = vec![pe];
                let mut acc = 0;
                for c in pe..n {
                    acc += n - c;
                    if acc >= per_chunk * bounds.len() && c + 1 < n {
                        bounds.push(c + 1);
                    }
                }
                bounds.push(n);
                std::thread::scope(|s| {
                    let mut rest = trail;
                    let mut rest_base = trail_base;
                    for w in bounds.windows(2) {
                        let (lo, hi) = (w[0], w[1]);
                        let len = offset(hi) - offset(lo);
                        let (chunk, tail) = rest.split_at_mut(len);
                        rest = tail;
                        let chunk_base = rest_base;
                        rest_base += len;
                        let update = &update_cols;
                        s.spawn(move || update(lo..hi, chunk, chunk_base));
                    }
                });
            }
        }
        pb = pe;
    }

    let mut l = DenseLowerTriangular::zeros(n);
    for c in 0..n {
        let base = offset(c);
        for i in c..n {
            l.data[i * n + c] = work[base + i - c];
        }
    }
    Ok(l)
}

/// Solves a triangular system with the given factor.
pub fn triangular_solve(
    l: &DenseLowerTriangular,
    b: &[f64],
    mode: SolveMode,
) -> Result<Vec<f64>, DenseError> {
    assert_eq!(l.dim, b.len(), "dimension mismatch");
    let n = l.dim;
    for i in 0..n {
        if l.get(i, i) == 0.0 {
            return Err(DenseError::ZeroDiagonal(i));
        }
    }
    let mut x = b.to_vec();
    match mode {
        SolveMode::Forward | SolveMode::BackwardTranspose => {
            for i in 0..n {
                let mut s = x[i];
                for j in 0..i {
                    s -= l.get(i, j) * x[j];
                }
                x[i] = s / l.get(i, i);
            }
        }
        SolveMode::Backward | SolveMode::ForwardTranspose => {
            for i in (0..n).rev() {
                let mut s = x[i];
                for j in i + 1..n {
                    s -= l.get(j, i) * x[j];
                }
                x[i] = s / l.get(i, i);
            }
        }
    }
    Ok(x)
}

/// Permutation reversing `0..k`; applying it twice is the identity. As a
/// permutation matrix `P` it satisfies `P_ij = 1` iff `i + j = k - 1`.
pub fn reversal_permutation(k: usize) -> Vec<usize> {
    assert!(k >= 1, "size must be positive");
    (0..k).map(|i| k - 1 - i).collect()
}

/// All eigenvalues of a symmetric matrix in ascending order, computed by
/// cyclic Jacobi sweeps. Intended for clique-scale blocks; the sweep cap is
/// `50 * dim`.
pub fn sym_eigenvalues(a: &DenseSymMatrix) -> Result<Vec<f64>, DenseError> {
    let n = a.dim;
    let mut m = a.data.clone();
    if n == 1 {
        return Ok(vec![m[0]]);
    }
    let frob: f64 = m.iter().map(|v| v * v).sum::<f64>().sqrt();
    let tol = 1e-14 * frob.max(f64::MIN_POSITIVE);
    let max_sweeps = 50 * n;
    for sweep in 0..=max_sweeps {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[i * n + j] * m[i * n + j];
            }
        }
        if (2.0 * off).sqrt() <= tol {
            let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
            eig.sort_by(f64::total_cmp);
            return Ok(eig);
        }
        if sweep == max_sweeps {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    Err(DenseError::NoConvergence(max_sweeps))
}

/// Inverse of a lower triangular matrix, computed column by column.
pub fn inverse_lower_triangular(
    m: &DenseLowerTriangular,
) -> Result<DenseLowerTriangular, DenseError> {
    let n = m.dim;
    for i in 0..n {
        if m.get(i, i) == 0.0 {
            return Err(DenseError::ZeroDiagonal(i));
        }
    }
    let mut inv = DenseLowerTriangular::zeros(n);
    for j in 0..n {
        inv.set(j, j, 1.0 / m.get(j, j));
        for i in j + 1..n {
            let mut s = 0.0;
            for k in j..i {
                s += m.get(i, k) * inv.get(k, j);
            }
            inv.set(i, j, -s / m.get(i, i));
        }
    }
    Ok(inv)
}
