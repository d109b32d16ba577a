use super::Clustering;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Normalised goodness-of-fit of a role assignment; lower is better.
///
/// For every ordered role pair `(s, t)` the block density `ρ_st` is the
/// fraction of node pairs in the block that are edges (self-pairs excluded
/// on the diagonal). The block contributes the mean squared deviation of
/// its adjacency entries from `ρ_st`, which for 0/1 entries is
/// `ρ_st (1 - ρ_st)`. The sum over all `r²` blocks is divided by `r²`.
/// Blocks without node pairs contribute 0.
pub fn goodness_of_fit(graph: &Graph, clustering: &Clustering) -> Result<f64> {
    let n = graph.node_count();
    if clustering.len() != n {
        return Err(Error::Input(format!("clustering covers {} of {n} nodes", clustering.len())));
    }
    let r = clustering.groups;
    if r == 0 {
        return Ok(0.0);
    }
    let sizes = clustering.sizes();
    let mut edges = vec![0usize; r * r];
    for (u, v) in graph.edges() {
        let (a, b) = (clustering.assignment[u], clustering.assignment[v]);
        edges[a * r + b] += 1;
        if a != b {
            edges[b * r + a] += 1;
        }
    }
    let mut total = 0.0;
    for s in 0..r {
        for t in 0..r {
            let pairs = if s == t { sizes[s] * sizes[s].saturating_sub(1) / 2 } else { sizes[s] * sizes[t] };
            if pairs == 0 {
                continue;
            }
            let rho = edges[s * r + t] as f64 / pairs as f64;
            total += rho * (1.0 - rho);
        }
    }
    Ok(total / (r * r) as f64)
}
