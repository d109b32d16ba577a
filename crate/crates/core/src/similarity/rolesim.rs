use super::{
    fill_symmetric, iterate, neighbor_matching, neighbor_weights, Measure, SimilarityConfig, SimilarityMatrix, Weights,
};
use crate::error::Result;
use crate::graph::Graph;

/// RoleSim: `R(u,v) = (1-β) · W / (|N(u)| + |N(v)| - |M|) + β`, where `W` is
/// the weight of the best matching `M` between the two neighbourhoods under
/// the previous iterate.
///
/// Starts from the all-ones matrix. A pair with exactly one isolated node
/// scores β; two isolated nodes score 1.
pub fn rolesim(graph: &Graph, config: &SimilarityConfig) -> Result<SimilarityMatrix> {
    let n = graph.node_count();
    let beta = config.beta;
    iterate(graph, Measure::RoleSim, config, vec![1.0; n * n], |prev, next| {
        fill_symmetric(graph, config.degree_prune_ratio, next, |u, v| {
            let (du, dv) = (graph.degree(u), graph.degree(v));
            match (du, dv) {
                (0, 0) => 1.0,
                (0, _) | (_, 0) => beta,
                _ => {
                    let mut buf = Vec::with_capacity(du * dv);
                    neighbor_weights(graph, prev, u, v, &mut buf);
                    let m = neighbor_matching(Weights::new(&buf, du, dv), config.matching_mode);
                    let denom = (du + dv - m.pairs.len()) as f64;
                    (1.0 - beta) * m.weight / denom + beta
                }
            }
        })
    })
}
