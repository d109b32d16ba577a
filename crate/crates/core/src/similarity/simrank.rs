use rayon::prelude::*;

use super::{fill_symmetric, iterate, Measure, SimilarityConfig, SimilarityMatrix};
use crate::error::Result;
use crate::graph::Graph;

/// SimRank: `s(u,v) = c / (|N(u)| |N(v)|) · Σ_{x∈N(u)} Σ_{y∈N(v)} s(x,y)`,
/// with `s(u,u) = 1` and `s(u,v) = 0` when either neighbourhood is empty.
/// Starts from the identity.
pub fn simrank(graph: &Graph, config: &SimilarityConfig) -> Result<SimilarityMatrix> {
    let n = graph.node_count();
    let c = config.simrank_c;
    let mut init = vec![0.0; n * n];
    for u in 0..n {
        init[u * n + u] = 1.0;
    }
    iterate(graph, Measure::SimRank, config, init, |prev, next| {
        // partial[u][y] = Σ_{x∈N(u)} prev[x][y]
        let mut partial = vec![0.0; n * n];
        partial.par_chunks_mut(n).enumerate().for_each(|(u, row)| {
            for &x in graph.neighbors(u) {
                for (acc, &s) in row.iter_mut().zip(&prev[x * n..(x + 1) * n]) {
                    *acc += s;
                }
            }
        });
        fill_symmetric(graph, config.degree_prune_ratio, next, |u, v| {
            let (du, dv) = (graph.degree(u), graph.degree(v));
            if du == 0 || dv == 0 {
                return 0.0;
            }
            let row = &partial[u * n..(u + 1) * n];
            let total: f64 = graph.neighbors(v).iter().map(|&y| row[y]).sum();
            c * total / (du * dv) as f64
        })
    })
}
