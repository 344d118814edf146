//! Chordal structure of an SDP: fill-reducing permutation, extended
//! pattern, ordered cliques, the shared factor layout, and partial matrices
//! whose values live only on the extended pattern.

use std::sync::Arc;

use crate::dense::DenseSymMatrix;
use crate::problem::SdpProblem;
use crate::sparse::{
    aggregate_pattern, extract_cliques, fill_reducing_order, symbolic_factorize, validate_cliques,
    Clique, EliminationStructure, FactorLayout, SparseError, SymPattern,
};

/// Largest number of fill positions a clique absorption may add when
/// coarsening the supernode partition.
pub const DEFAULT_MERGE_FILL_LIMIT: usize = 8;

#[derive(Debug, Clone)]
pub struct ChordalOptions {
    pub merge_fill_limit: usize,
}

impl Default for ChordalOptions {
    fn default() -> Self {
        Self {
            merge_fill_limit: DEFAULT_MERGE_FILL_LIMIT,
        }
    }
}

/// Chordal decomposition data shared by every factor-shaped object of one
/// solve. All index-carrying members (extended pattern, cliques, layout)
/// live in the permuted space; `perm`/`iperm` translate to original
/// indices.
#[derive(Debug)]
pub struct ChordalStructure {
    n: usize,
    perm: Vec<usize>,
    iperm: Vec<usize>,
    aggregate: SymPattern,
    extended: SymPattern,
    cliques: Vec<Clique>,
    layout: Arc<FactorLayout>,
    /// Per clique: layout offset of each packed lower block position,
    /// column-major within the block.
    block_maps: Vec<Vec<usize>>,
}

impl ChordalStructure {
    /// Builds the decomposition for a problem's aggregate sparsity pattern.
    pub fn build(problem: &SdpProblem, opts: &ChordalOptions) -> Result<Arc<Self>, SparseError> {
        Self::from_aggregate(aggregate_pattern(problem), opts)
    }

    /// Builds from an explicit aggregate pattern (original index space).
    pub fn from_aggregate(
        aggregate: SymPattern,
        opts: &ChordalOptions,
    ) -> Result<Arc<Self>, SparseError> {
        let n = aggregate.dim();
        let es = fill_reducing_order(&aggregate);
        let e0 = symbolic_factorize(&aggregate, &es);
        let cliques = extract_cliques(&e0, &es, opts.merge_fill_limit)?;
        let extended = SymPattern::from_pairs(
            n,
            cliques.iter().flat_map(|c| {
                let vs = c.vertices().to_vec();
                vs.clone().into_iter().flat_map(move |i| {
                    vs.iter()
                        .copied()
                        .filter(move |&j| j <= i)
                        .map(move |j| (i, j))
                })
            }),
        );
        debug_assert!(e0.is_subset_of(&extended));
        debug_assert!(aggregate.permuted(&es.iperm).is_subset_of(&extended));
        if cfg!(debug_assertions) {
            validate_cliques(n, &cliques, &extended).expect("clique contract violated");
        }
        let layout = FactorLayout::from_pattern(&extended);
        let block_maps = cliques
            .iter()
            .map(|c| {
                let vs = c.vertices();
                let k = vs.len();
                let mut map = Vec::with_capacity(k * (k + 1) / 2);
                for j in 0..k {
                    for i in j..k {
                        map.push(
                            layout
                                .offset_of(vs[i], vs[j])
                                .expect("clique block outside the extended pattern"),
                        );
                    }
                }
                map
            })
            .collect();
        Ok(Arc::new(Self {
            n,
            perm: es.perm,
            iperm: es.iperm,
            aggregate,
            extended,
            cliques,
            layout,
            block_maps,
        }))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Permutation: `perm[k]` is the original index at permuted position `k`.
    #[inline]
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Inverse permutation (original index -> permuted position).
    #[inline]
    pub fn iperm(&self) -> &[usize] {
        &self.iperm
    }

    /// Aggregate sparsity pattern in the original index space.
    #[inline]
    pub fn aggregate(&self) -> &SymPattern {
        &self.aggregate
    }

    /// Extended (chordal) pattern in the permuted space.
    #[inline]
    pub fn extended(&self) -> &SymPattern {
        &self.extended
    }

    #[inline]
    pub fn cliques(&self) -> &[Clique] {
        &self.cliques
    }

    #[inline]
    pub fn layout(&self) -> &Arc<FactorLayout> {
        &self.layout
    }

    /// Relabels a problem into the permuted space.
    pub fn permute_problem(&self, problem: &SdpProblem) -> SdpProblem {
        problem.permuted(&self.iperm)
    }

    /// Gathers clique `r`'s dense block from layout-aligned values.
    pub fn gather_block(&self, values: &[f64], r: usize) -> DenseSymMatrix {
        let k = self.cliques[r].len();
        let mut block = DenseSymMatrix::zeros(k);
        let mut pos = 0;
        for j in 0..k {
            for i in j..k {
                block.set(i, j, values[self.block_maps[r][pos]]);
                pos += 1;
            }
        }
        block
    }

    /// Layout offsets of clique `r`'s packed lower block (column-major).
    #[inline]
    pub fn block_offsets(&self, r: usize) -> &[usize] {
        &self.block_maps[r]
    }

    /// Summary statistics of the decomposition for a problem.
    pub fn stats(&self, problem: &SdpProblem) -> CliqueStats {
        let ell = self.cliques.len();
        let total: usize = self.cliques.iter().map(Clique::len).sum();
        let max_size = self.cliques.iter().map(Clique::len).max().unwrap_or(0);
        CliqueStats {
            n: self.n,
            m: problem.m,
            density: self.aggregate.nnz_lower() as f64 / (self.n * (self.n + 1) / 2) as f64,
            ell,
            ave_size: total as f64 / ell as f64,
            max_size,
        }
    }
}

/// Clique statistics of a decomposition. `density` is the filled fraction
/// of the aggregate pattern's stored (lower-triangle) positions.
#[derive(Debug, Clone, PartialEq)]
pub struct CliqueStats {
    pub n: usize,
    pub m: usize,
    pub density: f64,
    pub ell: usize,
    pub ave_size: f64,
    pub max_size: usize,
}

/// Values of a symmetric matrix stored only on the extended pattern, in the
/// permuted space, addressable per clique as dense blocks.
#[derive(Debug, Clone)]
pub struct PartialMatrix {
    structure: Arc<ChordalStructure>,
    values: Vec<f64>,
}

impl PartialMatrix {
    pub fn zeros(structure: Arc<ChordalStructure>) -> Self {
        let nnz = structure.layout.nnz();
        Self {
            structure,
            values: vec![0.0; nnz],
        }
    }

    pub fn scaled_identity(structure: Arc<ChordalStructure>, scale: f64) -> Self {
        let mut x = Self::zeros(structure);
        for j in 0..x.structure.n {
            let off = x.structure.layout.diag_offset(j);
            x.values[off] = scale;
        }
        x
    }

    #[inline]
    pub fn structure(&self) -> &Arc<ChordalStructure> {
        &self.structure
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Entry at permuted position `(i, j)`; zero off the extended pattern.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i >= j { (i, j) } else { (j, i) };
        self.structure
            .layout
            .offset_of(a, b)
            .map_or(0.0, |o| self.values[o])
    }

    /// Dense clique block `X̄[C_r, C_r]`.
    pub fn clique_block(&self, r: usize) -> DenseSymMatrix {
        self.structure.gather_block(&self.values, r)
    }

    /// `self += alpha * d` over the extended pattern.
    pub fn axpy(&mut self, alpha: f64, d: &[f64]) {
        assert_eq!(d.len(), self.values.len());
        for (x, y) in self.values.iter_mut().zip(d) {
            *x += alpha * y;
        }
    }

    /// Checks that every clique block is numerically positive definite;
    /// returns the first failing clique otherwise.
    pub fn clique_feasible(&self) -> Result<(), usize> {
        for r in 0..self.structure.cliques.len() {
            if crate::dense::dense_cholesky(&self.clique_block(r)).is_err() {
                return Err(r);
            }
        }
        Ok(())
    }
}

/// `out = A v` for a symmetric matrix stored as layout-aligned values.
pub fn sym_apply(layout: &FactorLayout, a: &[f64], v: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    for j in 0..layout.dim() {
        let range = layout.col_range(j);
        let vj = v[j];
        let mut acc = a[range.start] * vj;
        for off in range.start + 1..range.end {
            let i = layout.rows()[off];
            let val = a[off];
            out[i] += val * vj;
            acc += val * v[i];
        }
        out[j] += acc;
    }
}

/// Symmetric inner product of two layout-aligned value arrays: diagonal
/// entries count once, off-diagonal entries twice.
pub fn sym_dot(layout: &FactorLayout, a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for j in 0..layout.dim() {
        let range = layout.col_range(j);
        s += a[range.start] * b[range.start];
        for off in range.start + 1..range.end {
            s += 2.0 * a[off] * b[off];
        }
    }
    s
}
