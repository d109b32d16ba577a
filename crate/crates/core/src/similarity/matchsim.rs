use super::{
    fill_symmetric, iterate, neighbor_matching, neighbor_weights, Measure, SimilarityConfig, SimilarityMatrix, Weights,
};
use crate::error::Result;
use crate::graph::Graph;

/// MatchSim: `m(u,v) = W / max(|N(u)|, |N(v)|)` with `W` the best matching
/// weight between the neighbourhoods under the previous iterate. Starts from
/// the identity; two isolated nodes score 1, one isolated node scores 0.
pub fn matchsim(graph: &Graph, config: &SimilarityConfig) -> Result<SimilarityMatrix> {
    let n = graph.node_count();
    let mut init = vec![0.0; n * n];
    for u in 0..n {
        init[u * n + u] = 1.0;
    }
    iterate(graph, Measure::MatchSim, config, init, |prev, next| {
        fill_symmetric(graph, config.degree_prune_ratio, next, |u, v| {
            let (du, dv) = (graph.degree(u), graph.degree(v));
            match (du, dv) {
                (0, 0) => 1.0,
                (0, _) | (_, 0) => 0.0,
                _ => {
                    let mut buf = Vec::with_capacity(du * dv);
                    neighbor_weights(graph, prev, u, v, &mut buf);
                    let m = neighbor_matching(Weights::new(&buf, du, dv), config.matching_mode);
                    m.weight / du.max(dv) as f64
                }
            }
        })
    })
}
