//! Symbolic Cholesky: factor column structures and the extended pattern.

use super::ordering::EliminationStructure;
use super::pattern::SymPattern;

/// Elimination tree and per-column factor structures (rows strictly below
/// the diagonal, sorted) of a pattern factored in its natural order.
///
/// Column `j`'s structure is its pattern entries below the diagonal merged
/// with the structures of its elimination-tree children, minus `j` itself;
/// the parent is the smallest row in the structure.
pub(crate) fn column_structures(p: &SymPattern) -> (Vec<Option<usize>>, Vec<Vec<usize>>) {
    let n = p.dim();
    let mut etree: Vec<Option<usize>> = vec![None; n];
    let mut structs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut mark = vec![usize::MAX; n];
    for j in 0..n {
        let mut rows: Vec<usize> = Vec::new();
        for &i in p.col(j) {
            if i > j && mark[i] != j {
                mark[i] = j;
                rows.push(i);
            }
        }
        for &c in &children[j] {
            for &i in &structs[c] {
                if i > j && mark[i] != j {
                    mark[i] = j;
                    rows.push(i);
                }
            }
        }
        rows.sort_unstable();
        if let Some(&parent) = rows.first() {
            etree[j] = Some(parent);
            children[parent].push(j);
        }
        structs[j] = rows;
    }
    (etree, structs)
}

/// Permuted factor pattern (the extended sparsity pattern): the permuted
/// input plus all fill produced by elimination in the permuted order. The
/// result is chordal, with the natural order `0..n` as a perfect
/// elimination order.
pub fn symbolic_factorize(p: &SymPattern, es: &EliminationStructure) -> SymPattern {
    let permuted = p.permuted(&es.iperm);
    let (_, structs) = column_structures(&permuted);
    SymPattern::from_pairs(
        p.dim(),
        structs
            .iter()
            .enumerate()
            .flat_map(|(j, rows)| rows.iter().map(move |&i| (i, j))),
    )
}
