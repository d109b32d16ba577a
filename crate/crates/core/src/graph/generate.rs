use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// Stochastic blockmodel parameters.
///
/// With `block_matrix` unset, every intra-block pair is an edge with
/// probability `p_in` and every inter-block pair with `p_out`. A full
/// `block_matrix` (symmetric, one row per block) overrides both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmSpec {
    pub block_sizes: Vec<usize>,
    pub p_in: f64,
    pub p_out: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_matrix: Option<Vec<Vec<f64>>>,
    pub noise_edges: usize,
    pub seed: u64,
}

impl SbmSpec {
    pub const DEFAULT_P_IN: f64 = 0.3;
    pub const DEFAULT_P_OUT: f64 = 0.02;

    /// Planted-partition spec with the default densities.
    pub fn planted(block_sizes: Vec<usize>, noise_edges: usize, seed: u64) -> Self {
        SbmSpec {
            block_sizes,
            p_in: Self::DEFAULT_P_IN,
            p_out: Self::DEFAULT_P_OUT,
            block_matrix: None,
            noise_edges,
            seed,
        }
    }

    pub fn node_count(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    fn probability(&self, a: usize, b: usize) -> f64 {
        match &self.block_matrix {
            Some(m) => m[a][b],
            None if a == b => self.p_in,
            None => self.p_out,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_sizes.is_empty() || self.block_sizes.contains(&0) {
            return Err(Error::config("block sizes must be positive"));
        }
        let valid = |p: f64| (0.0..=1.0).contains(&p);
        match &self.block_matrix {
            None => {
                if !valid(self.p_in) || !valid(self.p_out) {
                    return Err(Error::config("probabilities must lie in [0, 1]"));
                }
                if self.p_out >= self.p_in {
                    return Err(Error::config("p_out must be smaller than p_in"));
                }
            }
            Some(m) => {
                let b = self.block_sizes.len();
                if m.len() != b || m.iter().any(|row| row.len() != b) {
                    return Err(Error::config(format!("block matrix must be {b}x{b}")));
                }
                for i in 0..b {
                    for j in 0..b {
                        if !valid(m[i][j]) || m[i][j] != m[j][i] {
                            return Err(Error::config("block matrix must be symmetric with entries in [0, 1]"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Four blocks of 50 nodes arranged as a chain 0 - 1 - 2 - 3. Blocks 0 to 2
/// have no internal edges and block 3 is only loosely knit, so each block is a
/// structural role rather than a community:
///
/// * block 0: leaves hanging off block 1 (expected degree 10),
/// * block 1: brokers between the leaves and block 2 (25),
/// * block 2: hubs linking brokers and block 3 (40),
/// * block 3: a loose cluster attached to the hubs (35).
pub fn planted_role_spec(noise_edges: usize, seed: u64) -> SbmSpec {
    SbmSpec {
        block_sizes: vec![50; 4],
        p_in: 0.0,
        p_out: 0.0,
        block_matrix: Some(vec![
            vec![0.0, 0.2, 0.0, 0.0],
            vec![0.2, 0.0, 0.3, 0.0],
            vec![0.0, 0.3, 0.0, 0.5],
            vec![0.0, 0.0, 0.5, 0.2],
        ]),
        noise_edges,
        seed,
    }
}

/// Samples a blockmodel graph plus `noise_edges` uniformly random extra
/// edges. Returns the graph and each node's block index.
///
/// Nodes are numbered block by block. The output is a pure function of `spec`.
pub fn generate_sbm(spec: &SbmSpec) -> Result<(Graph, Vec<usize>)> {
    spec.validate()?;
    let n = spec.node_count();
    let blocks: Vec<usize> =
        spec.block_sizes.iter().enumerate().flat_map(|(b, &size)| std::iter::repeat(b).take(size)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut edges: HashSet<(usize, usize)> = HashSet::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = spec.probability(blocks[u], blocks[v]);
            // always draw, so the stream does not depend on p
            let x: f64 = rng.gen();
            if x < p {
                edges.insert((u, v));
            }
        }
    }

    let total_pairs = n * (n - 1) / 2;
    let available = total_pairs - edges.len();
    if spec.noise_edges > available {
        return Err(Error::Capacity { requested: spec.noise_edges, available });
    }
    if spec.noise_edges > 0 {
        if 2 * spec.noise_edges <= available {
            let mut added = 0;
            while added < spec.noise_edges {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u == v {
                    continue;
                }
                if edges.insert((u.min(v), u.max(v))) {
                    added += 1;
                }
            }
        } else {
            let mut absent: Vec<(usize, usize)> =
                (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).filter(|e| !edges.contains(e)).collect();
            absent.partial_shuffle(&mut rng, spec.noise_edges);
            edges.extend(absent.into_iter().take(spec.noise_edges));
        }
    }

    let mut sorted: Vec<_> = edges.into_iter().collect();
    sorted.sort_unstable();
    Ok((Graph::from_edges(n, sorted)?, blocks))
}

/// Structural role of a node in [`generate_role_toy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Periphery,
    Star,
    Bridge,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Periphery => "periphery",
            Role::Star => "star",
            Role::Bridge => "bridge",
        }
    }
}

/// Ten-node role fixture.
///
/// Stars 6 and 7 each hold three periphery leaves (0-2 and 3-5); bridges 8
/// and 9 are each adjacent to both stars.
///
/// ```text
///  0 1 2           3 4 5
///   \|/             \|/
///    6 ---- 8 ----- 7
///     \            /
///      `--- 9 ----'
/// ```
pub fn generate_role_toy() -> (Graph, Vec<Role>) {
    let edges = [(0, 6), (1, 6), (2, 6), (3, 7), (4, 7), (5, 7), (6, 8), (6, 9), (7, 8), (7, 9)];
    let graph = Graph::from_edges(10, edges).expect("static fixture");
    let mut roles = vec![Role::Periphery; 6];
    roles.extend([Role::Star, Role::Star, Role::Bridge, Role::Bridge]);
    (graph, roles)
}
