//! Fill-reducing ordering and the elimination structure of the permuted
//! pattern.

use std::collections::BTreeSet;

use super::pattern::SymPattern;
use super::symbolic::column_structures;

/// Permutation, elimination tree and factor column counts for a pattern.
/// `perm[k]` is the original index placed at position `k`; `iperm` is the
/// inverse map. The elimination tree and column counts refer to the
/// permuted pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationStructure {
    pub perm: Vec<usize>,
    pub iperm: Vec<usize>,
    pub etree: Vec<Option<usize>>,
    pub colcounts: Vec<usize>,
}

impl EliminationStructure {
    pub fn with_permutation(p: &SymPattern, perm: Vec<usize>) -> Self {
        let n = p.dim();
        assert_eq!(perm.len(), n);
        let mut iperm = vec![usize::MAX; n];
        for (k, &old) in perm.iter().enumerate() {
            assert!(iperm[old] == usize::MAX, "perm is not a bijection");
            iperm[old] = k;
        }
        let permuted = p.permuted(&iperm);
        let (etree, structs) = column_structures(&permuted);
        let colcounts = structs.iter().map(|s| s.len() + 1).collect();
        Self {
            perm,
            iperm,
            etree,
            colcounts,
        }
    }

    /// Identity permutation; the pattern is factored in its natural order.
    pub fn natural(p: &SymPattern) -> Self {
        Self::with_permutation(p, (0..p.dim()).collect())
    }

    /// Factor nonzero count implied by the column counts.
    pub fn factor_nnz(&self) -> usize {
        self.colcounts.iter().sum()
    }
}

/// Minimum-degree ordering on the elimination graph with deterministic
/// tie-breaking by smallest original index. Identical input yields an
/// identical permutation on every run and thread count.
pub fn fill_reducing_order(p: &SymPattern) -> EliminationStructure {
    let n = p.dim();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (i, j) in p.lower_iter() {
        if i != j {
            adj[i].insert(j);
            adj[j].insert(i);
        }
    }
    let mut deg: Vec<usize> = (0..n).map(|v| adj[v].len()).collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (deg[v], v)).collect();
    let mut perm = Vec::with_capacity(n);
    while let Some(&(d, v)) = queue.iter().next() {
        queue.remove(&(d, v));
        perm.push(v);
        let neighbors: Vec<usize> = std::mem::take(&mut adj[v]).into_iter().collect();
        for &u in &neighbors {
            adj[u].remove(&v);
        }
        // Eliminating v turns its neighborhood into a clique.
        for (ai, &a) in neighbors.iter().enumerate() {
            for &b in &neighbors[ai + 1..] {
                if adj[a].insert(b) {
                    adj[b].insert(a);
                }
            }
        }
        for &u in &neighbors {
            let fresh = adj[u].len();
            if fresh != deg[u] {
                queue.remove(&(deg[u], u));
                deg[u] = fresh;
                queue.insert((fresh, u));
            }
        }
    }
    EliminationStructure::with_permutation(p, perm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pattern_orders_identity() {
        let p = SymPattern::diagonal(5);
        let es = fill_reducing_order(&p);
        assert_eq!(es.perm, vec![0, 1, 2, 3, 4]);
        assert_eq!(es.colcounts, vec![1; 5]);
        assert!(es.etree.iter().all(Option::is_none));
    }

    /// Fill of a pattern under a given elimination order, counted by
    /// explicit graph elimination.
    fn fill_of(p: &SymPattern, order: &[usize]) -> usize {
        let n = p.dim();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (i, j) in p.lower_iter() {
            if i != j {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
        let mut pos = vec![0usize; n];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let mut fill = 0;
        for &v in order {
            let later: Vec<usize> = adj[v].iter().copied().filter(|&u| pos[u] > pos[v]).collect();
            for (ai, &a) in later.iter().enumerate() {
                for &b in &later[ai + 1..] {
                    if adj[a].insert(b) {
                        adj[b].insert(a);
                        fill += 1;
                    }
                }
            }
        }
        fill
    }

    #[test]
    fn star_center_is_ordered_last_with_zero_fill() {
        // Star with center 0 and leaves 1..4.
        let p = SymPattern::from_pairs(5, (1..5).map(|i| (i, 0)));
        let es = fill_reducing_order(&p);
        assert_eq!(*es.perm.last().unwrap(), 0);
        assert_eq!(fill_of(&p, &es.perm), 0);
        // Brute force over all 120 permutations confirms 0 is optimal.
        let mut best = usize::MAX;
        let mut order = vec![0, 1, 2, 3, 4];
        permute_all(&mut order, 0, &mut |o| best = best.min(fill_of(&p, o)));
        assert_eq!(best, 0);
    }

    fn permute_all(order: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == order.len() {
            f(order);
            return;
        }
        for i in k..order.len() {
            order.swap(k, i);
            permute_all(order, k + 1, f);
            order.swap(k, i);
        }
    }

    #[test]
    fn chain_natural_order_has_zero_fill() {
        let p = SymPattern::from_pairs(4, [(1, 0), (2, 1), (3, 2)]);
        assert_eq!(fill_of(&p, &[0, 1, 2, 3]), 0);
        let es = EliminationStructure::natural(&p);
        assert_eq!(es.colcounts, vec![2, 2, 2, 1]);
        assert_eq!(es.etree, vec![Some(1), Some(2), Some(3), None]);
    }

    #[test]
    fn ordering_is_deterministic() {
        let p = SymPattern::from_pairs(
            30,
            (0..30).flat_map(|i| (0..i).filter(move |j| (i * 7 + j * 13) % 5 == 0).map(move |j| (i, j))),
        );
        let a = fill_reducing_order(&p);
        let b = fill_reducing_order(&p);
        assert_eq!(a.perm, b.perm);
    }
}
