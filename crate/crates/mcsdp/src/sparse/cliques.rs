//! Clique extraction from a chordal pattern.
//!
//! Columns of the factor pattern are grouped into supernodes (consecutive
//! columns with identical below-diagonal structure), optionally coarsened
//! by absorbing a clique into the one containing its shared indices when
//! that adds at most a fixed number of fill positions. The resulting
//! cliques are ordered so that the running intersection property holds:
//! each clique's shared index set is contained in a single later clique.

use std::collections::BTreeSet;

use super::ordering::EliminationStructure;
use super::pattern::SymPattern;
use super::SparseError;

/// One clique of the chordal pattern. `vertices` is sorted ascending; the
/// first `s_len` entries are the owned indices (appearing in no later
/// clique), the rest are shared with later cliques.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clique {
    vertices: Vec<usize>,
    s_len: usize,
}

impl Clique {
    #[inline]
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Indices owned by this clique (the supernode columns).
    #[inline]
    pub fn owned(&self) -> &[usize] {
        &self.vertices[..self.s_len]
    }

    /// Indices shared with later cliques.
    #[inline]
    pub fn shared(&self) -> &[usize] {
        &self.vertices[self.s_len..]
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    #[inline]
    pub fn owned_len(&self) -> usize {
        self.s_len
    }
}

/// Extracts the ordered clique list from a chordal pattern `e` whose
/// perfect elimination order is the natural order of `es`.
///
/// `merge_fill_limit` is the largest number of new lower-triangle positions
/// a clique absorption may introduce; 0 disables coarsening.
pub fn extract_cliques(
    e: &SymPattern,
    es: &EliminationStructure,
    merge_fill_limit: usize,
) -> Result<Vec<Clique>, SparseError> {
    let n = e.dim();
    assert_eq!(es.perm.len(), n);
    // Below-diagonal structures and parents, straight from the pattern.
    let structs: Vec<&[usize]> = (0..n).map(|j| &e.col(j)[1..]).collect();
    let parent: Vec<Option<usize>> = structs.iter().map(|s| s.first().copied()).collect();

    // Perfect elimination check: struct(j) \ {parent} must be contained in
    // struct(parent).
    for j in 0..n {
        if let Some(p) = parent[j] {
            let ps = structs[p];
            for &i in &structs[j][1..] {
                if ps.binary_search(&i).is_err() {
                    return Err(SparseError::NotChordal(j));
                }
            }
        }
    }

    // Supernodes: column j joins column j+1 when the structures are nested
    // exactly, i.e. parent(j) = j+1 and |struct(j)| = |struct(j+1)| + 1.
    let mut heads: Vec<usize> = Vec::new();
    let mut head_of = vec![0usize; n];
    let mut j = 0;
    while j < n {
        let start = j;
        heads.push(start);
        while j + 1 < n && parent[j] == Some(j + 1) && structs[j].len() == structs[j + 1].len() + 1
        {
            j += 1;
        }
        for c in start..=j {
            head_of[c] = heads.len() - 1;
        }
        j += 1;
    }

    // Initial cliques: owned = the column run, shared = the structure below
    // the last column of the run.
    struct Node {
        owned: Vec<usize>,
        shared: Vec<usize>,
        live: bool,
    }
    let mut nodes: Vec<Node> = heads
        .iter()
        .enumerate()
        .map(|(r, &start)| {
            let end = if r + 1 < heads.len() {
                heads[r + 1] - 1
            } else {
                n - 1
            };
            Node {
                owned: (start..=end).collect(),
                shared: structs[end].to_vec(),
                live: true,
            }
        })
        .collect();

    // owner_of[col] = live node currently owning that column.
    let mut owner_of: Vec<usize> = head_of;

    if merge_fill_limit > 0 {
        // Mutable copy of the pattern for fill accounting.
        let mut cover: Vec<BTreeSet<usize>> = (0..n).map(|j| e.col(j).iter().copied().collect()).collect();
        for r in 0..nodes.len() {
            if !nodes[r].live || nodes[r].shared.is_empty() {
                continue;
            }
            let t = owner_of[nodes[r].shared[0]];
            debug_assert!(t != r && nodes[t].live);
            // Positions the union block would add: owned(r) x (C_t \ C_r).
            let target_set: BTreeSet<usize> = nodes[t]
                .owned
                .iter()
                .chain(nodes[t].shared.iter())
                .copied()
                .collect();
            let child_set: BTreeSet<usize> = nodes[r]
                .owned
                .iter()
                .chain(nodes[r].shared.iter())
                .copied()
                .collect();
            let mut new_pairs: Vec<(usize, usize)> = Vec::new();
            for &s in &nodes[r].owned {
                for &v in target_set.difference(&child_set) {
                    let (hi, lo) = if v > s { (v, s) } else { (s, v) };
                    if !cover[lo].contains(&hi) {
                        new_pairs.push((hi, lo));
                    }
                }
            }
            if new_pairs.len() <= merge_fill_limit {
                for &(hi, lo) in &new_pairs {
                    cover[lo].insert(hi);
                }
                let mut owned: Vec<usize> = nodes[r]
                    .owned
                    .iter()
                    .chain(nodes[t].owned.iter())
                    .copied()
                    .collect();
                owned.sort_unstable();
                for &c in &nodes[r].owned {
                    owner_of[c] = t;
                }
                nodes[r].live = false;
                nodes[t].owned = owned;
                // The merged clique's shared set is the target's: the
                // child's shared indices all lie inside the target.
            }
        }
    }

    // Order by the largest owned column; the clique containing a shared set
    // always owns a larger column than the clique sharing it.
    let mut live: Vec<&Node> = nodes.iter().filter(|nd| nd.live).collect();
    live.sort_by_key(|nd| *nd.owned.last().unwrap());
    let cliques = live
        .into_iter()
        .map(|nd| {
            let mut vertices = nd.owned.clone();
            vertices.extend_from_slice(&nd.shared);
            debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
            Clique {
                vertices,
                s_len: nd.owned.len(),
            }
        })
        .collect();
    Ok(cliques)
}

/// Checks the structural contract of an ordered clique list: the owned sets
/// partition `0..n`, every pattern position is covered by some clique
/// block, shared sets match their definition, and the running intersection
/// property holds.
pub fn validate_cliques(n: usize, cliques: &[Clique], e: &SymPattern) -> Result<(), String> {
    let mut owner = vec![usize::MAX; n];
    for (r, c) in cliques.iter().enumerate() {
        for &v in c.owned() {
            if owner[v] != usize::MAX {
                return Err(format!("index {v} owned by cliques {} and {r}", owner[v]));
            }
            owner[v] = r;
        }
    }
    if let Some(v) = owner.iter().position(|&r| r == usize::MAX) {
        return Err(format!("index {v} is owned by no clique"));
    }
    for (r, c) in cliques.iter().enumerate() {
        // S_r = C_r minus all later cliques; U_r inside a single later one.
        for &v in c.shared() {
            if owner[v] <= r {
                return Err(format!("shared index {v} of clique {r} not owned later"));
            }
        }
        for (s, later) in cliques.iter().enumerate().skip(r + 1) {
            for &v in later.vertices() {
                if c.owned().binary_search(&v).is_ok() {
                    return Err(format!("owned index {v} of clique {r} reappears in {s}"));
                }
            }
        }
        if !c.shared().is_empty() {
            let t = owner[c.shared()[0]];
            let target: BTreeSet<usize> = cliques[t].vertices().iter().copied().collect();
            if !c.shared().iter().all(|v| target.contains(v)) {
                return Err(format!(
                    "running intersection fails for clique {r}: shared set not inside clique {t}"
                ));
            }
        }
    }
    if let Some(last) = cliques.last() {
        if !last.shared().is_empty() {
            return Err("last clique has a nonempty shared set".into());
        }
    }
    for (i, j) in e.lower_iter() {
        let covered = cliques.iter().any(|c| {
            c.vertices().binary_search(&i).is_ok() && c.vertices().binary_search(&j).is_ok()
        });
        if !covered {
            return Err(format!("pattern position ({i},{j}) covered by no clique"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::symbolic_factorize;

    fn natural_cliques(p: &SymPattern, merge: usize) -> Vec<Clique> {
        let es = EliminationStructure::natural(p);
        let e = symbolic_factorize(p, &es);
        let cliques = extract_cliques(&e, &es, merge).unwrap();
        validate_cliques(p.dim(), &cliques, &e).unwrap();
        cliques
    }

    #[test]
    fn diagonal_pattern_yields_singletons() {
        let p = SymPattern::diagonal(3);
        let cliques = natural_cliques(&p, 8);
        assert_eq!(cliques.len(), 3);
        for (r, c) in cliques.iter().enumerate() {
            assert_eq!(c.vertices(), &[r]);
            assert_eq!(c.owned(), &[r]);
            assert!(c.shared().is_empty());
        }
    }

    #[test]
    fn full_pattern_yields_single_clique() {
        let p = SymPattern::full(5);
        let cliques = natural_cliques(&p, 8);
        assert_eq!(cliques.len(), 1);
        assert_eq!(cliques[0].vertices(), &[0, 1, 2, 3, 4]);
        assert_eq!(cliques[0].owned_len(), 5);
    }

    #[test]
    fn tridiagonal_without_coarsening_matches_maximal_cliques() {
        // Brute-force maximal cliques of the 4-path: {0,1}, {1,2}, {2,3}.
        let p = SymPattern::from_pairs(4, [(1, 0), (2, 1), (3, 2)]);
        let cliques = natural_cliques(&p, 0);
        let vertex_sets: Vec<&[usize]> = cliques.iter().map(|c| c.vertices()).collect();
        assert_eq!(vertex_sets, vec![&[0, 1][..], &[1, 2], &[2, 3]]);
        assert_eq!(cliques[0].owned(), &[0]);
        assert_eq!(cliques[1].owned(), &[1]);
        assert_eq!(cliques[2].owned(), &[2, 3]);
    }

    #[test]
    fn tridiagonal_with_default_coarsening_collapses() {
        // Each absorption adds 1 then 2 fill positions, both below the
        // limit, so the 4-path coarsens into one clique.
        let p = SymPattern::from_pairs(4, [(1, 0), (2, 1), (3, 2)]);
        let cliques = natural_cliques(&p, 8);
        assert_eq!(cliques.len(), 1);
        assert_eq!(cliques[0].vertices(), &[0, 1, 2, 3]);
    }

    #[test]
    fn long_chain_coarsens_into_bounded_cliques() {
        let n = 40;
        let p = SymPattern::from_pairs(n, (1..n).map(|i| (i, i - 1)));
        let cliques = natural_cliques(&p, 8);
        assert!(cliques.len() > 1);
        for c in &cliques {
            assert!(c.len() <= 12, "clique unexpectedly large: {}", c.len());
        }
    }

    #[test]
    fn non_chordal_pattern_is_rejected()
    {
        // 4-cycle without a chord: 0-1-2-3-0.
        let p = SymPattern::from_pairs(4, [(1, 0), (2, 1), (3, 2), (3, 0)]);
        let es = EliminationStructure::natural(&p);
        let err = extract_cliques(&p, &es, 0).unwrap_err();
        assert!(matches!(err, SparseError::NotChordal(_)));
    }
}
