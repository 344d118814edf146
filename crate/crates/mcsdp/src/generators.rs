//! Benchmark problem generators: lattice graphs, the Lovász max-clique
//! relaxation, the max-cut relaxation, and a seeded random SDP factory with
//! guaranteed strict interior on both sides.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::problem::{SdpProblem, SparseSymMat};

/// Simple undirected graph with edges stored as `(a, b)`, `a < b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut es: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(a, b)| {
                assert!(a != b && a < n && b < n, "bad edge ({a},{b})");
                (a.min(b), a.max(b))
            })
            .collect();
        es.sort_unstable();
        es.dedup();
        Self { n, edges: es }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_edges(n, [])
    }

    pub fn complete(n: usize) -> Self {
        Self::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i)))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).is_ok()
    }

    /// Non-edges `(a, b)` with `a < b`.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if !self.has_edge(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// A p-by-q lattice graph: vertex `i + j*p` sits in row `i` of column `j`,
/// with edges between vertical and horizontal neighbors.
#[derive(Debug, Clone)]
pub struct LatticeGraph {
    pub p: usize,
    pub q: usize,
    graph: Graph,
}

impl LatticeGraph {
    #[inline]
    pub fn graph(&self) -> &Graph {
        &self.graph
    }
}

/// Builds the lattice graph on `p * q` vertices with
/// `(p-1)q + p(q-1)` edges.
pub fn lattice_graph(p: usize, q: usize) -> LatticeGraph {
    assert!(p >= 1 && q >= 1);
    let mut edges = Vec::with_capacity((p - 1) * q + p * (q - 1));
    for j in 0..q {
        for i in 0..p {
            let v = i + j * p;
            if i + 1 < p {
                edges.push((v, v + 1));
            }
            if j + 1 < q {
                edges.push((v, v + p));
            }
        }
    }
    LatticeGraph {
        p,
        q,
        graph: Graph::from_edges(p * q, edges),
    }
}

/// Lovász bound on the clique number, emitted in minimization form: the
/// objective matrix is `-eeᵀ`, the first constraint fixes the trace to 1,
/// and every non-edge `(i, j)` contributes `(e_i e_jᵀ + e_j e_iᵀ) • X = 0`.
/// The bound itself is the negated optimal objective.
pub fn maxclique_sdp(g: &Graph) -> SdpProblem {
    let n = g.n();
    let mut obj = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in 0..=i {
            obj.push((i, j, -1.0));
        }
    }
    let mut mats = vec![SparseSymMat::from_lower_triplets(n, &obj)];
    let mut b = Vec::new();
    let trace: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, i, 1.0)).collect();
    mats.push(SparseSymMat::from_lower_triplets(n, &trace));
    b.push(1.0);
    for (a, c) in g.non_edges() {
        mats.push(SparseSymMat::from_lower_triplets(n, &[(c, a, 1.0)]));
        b.push(0.0);
    }
    SdpProblem::new(n, mats, b)
}

/// Max-cut relaxation: `min (W - diag(We)) • X` subject to unit diagonal.
/// `weights[k]` is the weight of edge `g.edges()[k]`; the weight matrix is
/// symmetric with both `(i,j)` and `(j,i)` equal to the edge weight.
pub fn maxcut_sdp(g: &Graph, weights: &[f64]) -> SdpProblem {
    let n = g.n();
    assert_eq!(weights.len(), g.edges().len());
    assert!(weights.iter().all(|&w| w >= 0.0), "weights must be nonnegative");
    let mut rowsum = vec![0.0; n];
    let mut obj = Vec::with_capacity(g.edges().len() + n);
    for (&(a, b), &w) in g.edges().iter().zip(weights) {
        rowsum[a] += w;
        rowsum[b] += w;
        obj.push((b, a, w));
    }
    for (i, &s) in rowsum.iter().enumerate() {
        obj.push((i, i, -s));
    }
    let mut mats = vec![SparseSymMat::from_lower_triplets(n, &obj)];
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        mats.push(SparseSymMat::from_lower_triplets(n, &[(i, i, 1.0)]));
        b.push(1.0);
    }
    SdpProblem::new(n, mats, b)
}

/// Unit weight for every edge.
pub fn unit_weights(g: &Graph) -> Vec<f64> {
    vec![1.0; g.edges().len()]
}

/// Seeded uniform weights in `(0, 1]`.
pub fn random_weights(g: &Graph, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    g.edges()
        .iter()
        .map(|_| rng.gen_range(0.0_f64..1.0).max(1e-3))
        .collect()
}

/// Random sparse SDP with strict interior on both sides. The constraint
/// right-hand sides come from a random positive definite primal point and
/// the objective matrix from a random dual-feasible slack, so strong
/// duality holds and both optima are attained.
pub fn random_chordal_sdp(seed: u64, n: usize, m: usize, density: f64) -> SdpProblem {
    assert!(n >= 1 && m >= 1);
    assert!((0.0..=1.0).contains(&density));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Shared off-diagonal position pool.
    let mut pool: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..i {
            if rng.gen_bool(density) {
                pool.push((i, j));
            }
        }
    }

    // Strictly feasible primal point: X0 = R Rᵀ / n + I.
    let mut r = vec![0.0; n * n];
    for v in r.iter_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    let x0 = |i: usize, j: usize| -> f64 {
        let mut s = 0.0;
        for k in 0..n {
            s += r[i * n + k] * r[j * n + k];
        }
        s / n as f64 + if i == j { 1.0 } else { 0.0 }
    };

    let mut mats: Vec<SparseSymMat> = Vec::with_capacity(m + 1);
    mats.push(SparseSymMat::zero(n)); // placeholder for the objective
    let mut b = Vec::with_capacity(m);
    for _ in 0..m {
        let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
        // Always one diagonal entry; a few pool entries when available.
        let d = rng.gen_range(0..n);
        triplets.push((d, d, rng.gen_range(0.5..1.5)));
        if !pool.is_empty() {
            for _ in 0..rng.gen_range(1..=3) {
                let &(i, j) = &pool[rng.gen_range(0..pool.len())];
                if !triplets.iter().any(|&(a, c, _)| (a, c) == (i, j)) {
                    triplets.push((i, j, rng.gen_range(-1.0..1.0)));
                }
            }
        }
        let a = SparseSymMat::from_lower_triplets(n, &triplets);
        let bk = a
            .lower_triplets()
            .into_iter()
            .map(|(i, j, v)| if i == j { v * x0(i, j) } else { 2.0 * v * x0(i, j) })
            .sum();
        b.push(bk);
        mats.push(a);
    }

    // Dual-feasible slack S0: diagonally dominant on the pool positions.
    let mut s0: Vec<(usize, usize, f64)> = Vec::new();
    let mut dom = vec![0.0; n];
    for &(i, j) in &pool {
        let v: f64 = rng.gen_range(-0.5..0.5);
        dom[i] += v.abs();
        dom[j] += v.abs();
        s0.push((i, j, v));
    }
    for (i, &d) in dom.iter().enumerate() {
        s0.push((i, i, d + 0.5 + rng.gen_range(0.0..1.0)));
    }
    // Objective A0 = sum Ak yk + S0 for random y.
    let y: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut acc: std::collections::BTreeMap<(usize, usize), f64> = std::collections::BTreeMap::new();
    for (i, j, v) in s0 {
        *acc.entry((i, j)).or_insert(0.0) += v;
    }
    for (k, yk) in y.iter().enumerate() {
        for (i, j, v) in mats[k + 1].lower_triplets() {
            *acc.entry((i, j)).or_insert(0.0) += yk * v;
        }
    }
    let obj: Vec<(usize, usize, f64)> = acc.into_iter().map(|((i, j), v)| (i, j, v)).collect();
    mats[0] = SparseSymMat::from_lower_triplets(n, &obj);

    SdpProblem::new(n, mats, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdpa::write_sdpa_sparse;

    #[test]
    fn lattice_examples() {
        let g = lattice_graph(4, 3);
        assert_eq!(g.graph().n(), 12);
        assert_eq!(g.graph().edges().len(), 17);

        let g = lattice_graph(1, 1);
        assert_eq!(g.graph().n(), 1);
        assert!(g.graph().edges().is_empty());

        let g = lattice_graph(2, 1);
        assert_eq!(g.graph().edges(), &[(0, 1)]);
    }

    #[test]
    fn lattice_edge_count_formula() {
        for p in 1..=50 {
            for q in 1..=50 {
                let g = lattice_graph(p, q);
                assert_eq!(g.graph().edges().len(), (p - 1) * q + p * (q - 1));
            }
        }
    }

    #[test]
    fn maxclique_constraint_counts() {
        let k5 = maxclique_sdp(&Graph::complete(5));
        assert_eq!(k5.m, 1);
        let empty = maxclique_sdp(&Graph::empty(3));
        assert_eq!(empty.m, 1 + 3);
        let g = lattice_graph(3, 2);
        let p = maxclique_sdp(g.graph());
        let n = 6;
        assert_eq!(p.m, 1 + (n * (n - 1) / 2 - g.graph().edges().len()));
    }

    #[test]
    fn maxcut_zero_weights_gives_zero_objective() {
        let g = lattice_graph(2, 2);
        let w = vec![0.0; g.graph().edges().len()];
        let p = maxcut_sdp(g.graph(), &w);
        assert!(p.objective().is_empty());
        assert_eq!(p.m, 4);
        assert!(p.b.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn maxcut_single_edge_objective() {
        let g = Graph::from_edges(2, [(0, 1)]);
        let p = maxcut_sdp(&g, &[1.0]);
        let a0 = p.objective().to_dense();
        assert_eq!(a0.get(0, 0), -1.0);
        assert_eq!(a0.get(0, 1), 1.0);
        assert_eq!(a0.get(1, 1), -1.0);
    }

    #[test]
    fn random_sdp_is_deterministic() {
        let a = random_chordal_sdp(42, 12, 8, 0.2);
        let b = random_chordal_sdp(42, 12, 8, 0.2);
        assert_eq!(write_sdpa_sparse(&a), write_sdpa_sparse(&b));
        let c = random_chordal_sdp(43, 12, 8, 0.2);
        assert_ne!(write_sdpa_sparse(&a), write_sdpa_sparse(&c));
    }

    #[test]
    fn dense_random_sdp_is_single_clique() {
        use crate::chordal::{ChordalOptions, ChordalStructure};
        let p = random_chordal_sdp(7, 8, 5, 1.0);
        let s = ChordalStructure::build(&p, &ChordalOptions::default()).unwrap();
        assert_eq!(s.cliques().len(), 1);
        assert_eq!(s.cliques()[0].len(), 8);
    }
}
