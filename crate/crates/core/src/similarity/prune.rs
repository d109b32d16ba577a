use super::SimilarityMatrix;
use crate::graph::Graph;

/// True when the larger degree exceeds `ratio` times the smaller one.
/// Pairs involving an isolated node are never pruned.
#[inline]
pub fn is_pruned(du: usize, dv: usize, ratio: f64) -> bool {
    let (lo, hi) = (du.min(dv), du.max(dv));
    lo >= 1 && hi as f64 > ratio * lo as f64
}

/// Zeroes every off-diagonal pair whose degrees differ by more than `ratio`.
pub fn apply_degree_pruning(matrix: &SimilarityMatrix, graph: &Graph, ratio: f64) -> SimilarityMatrix {
    let mut out = matrix.clone();
    let n = graph.node_count();
    for u in 0..n {
        for v in (u + 1)..n {
            if is_pruned(graph.degree(u), graph.degree(v), ratio) {
                out.set_symmetric(u, v, 0.0);
            }
        }
    }
    out
}
