//! Training pairs from a similarity matrix: each node's top-k most similar
//! nodes are its positives, and an equal number of uniformly drawn nodes are
//! its negatives, redrawn for each of `r` rounds.

use std::io::Write;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::similarity::SimilarityMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub k: usize,
    pub r: usize,
    pub seed: u64,
    /// `positives[v]`: the k nodes most similar to `v`, best first.
    pub positives: Vec<Vec<usize>>,
    /// `negatives[round][v]`: k negatives of `v` for that round.
    pub negatives: Vec<Vec<Vec<usize>>>,
}

impl TrainingSet {
    pub fn node_count(&self) -> usize {
        self.positives.len()
    }

    pub fn rounds(&self) -> usize {
        self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positives.is_empty() || self.k == 0 || self.negatives.is_empty()
    }

    /// Number of positive pairs over all rounds (equal to the negative count).
    pub fn pair_count(&self) -> usize {
        self.negatives.iter().flatten().map(Vec::len).sum()
    }

    /// Writes `round<TAB>v<TAB>u<TAB>{+,-}` lines.
    pub fn write_tsv<W: Write>(&self, graph: &Graph, mut out: W) -> Result<()> {
        for (round, negs) in self.negatives.iter().enumerate() {
            for (v, (pos, neg)) in self.positives.iter().zip(negs).enumerate() {
                let tv = graph.token(v);
                for &u in pos {
                    writeln!(out, "{round}\t{tv}\t{}\t+", graph.token(u))?;
                }
                for &u in neg {
                    writeln!(out, "{round}\t{tv}\t{}\t-", graph.token(u))?;
                }
            }
        }
        Ok(())
    }
}

/// The `k` nodes other than `v` with the highest `matrix[v][u]`, ties broken
/// by smaller id. Zero scores are only reached once nonzero ones run out.
pub fn sample_positives(matrix: &SimilarityMatrix, v: usize, k: usize) -> Result<Vec<usize>> {
    let n = matrix.node_count();
    if k >= n {
        return Err(Error::config(format!("k = {k} must be below the node count {n}")));
    }
    let row = matrix.row(v);
    let mut candidates: Vec<usize> = (0..n).filter(|&u| u != v).collect();
    let order = |a: &usize, b: &usize| row[*b].total_cmp(&row[*a]).then(a.cmp(b));
    if k < candidates.len() {
        candidates.select_nth_unstable_by(k, order);
        candidates.truncate(k);
    }
    candidates.sort_unstable_by(order);
    Ok(candidates)
}

/// `k` distinct nodes drawn uniformly from everything except `v` and
/// `exclusions`.
pub fn sample_negatives<R: Rng + ?Sized>(
    node_count: usize,
    v: usize,
    k: usize,
    exclusions: &[usize],
    rng: &mut R,
) -> Result<Vec<usize>> {
    let pool = candidate_pool(node_count, v, exclusions);
    if pool.len() < k {
        return Err(Error::config(format!("node {v}: only {} negative candidates for k = {k}", pool.len())));
    }
    Ok(index::sample(rng, pool.len(), k).into_iter().map(|i| pool[i]).collect())
}

fn candidate_pool(node_count: usize, v: usize, exclusions: &[usize]) -> Vec<usize> {
    let mut excluded = vec![false; node_count];
    excluded[v] = true;
    for &u in exclusions {
        excluded[u] = true;
    }
    (0..node_count).filter(|&u| !excluded[u]).collect()
}

/// Builds `r` rounds of training pairs.
///
/// Positives are identical in every round; negatives are redrawn per round
/// from a per-node generator seeded with `seed ^ v`. When fewer than `k`
/// non-positive nodes exist the negatives of that node are drawn with
/// replacement from those that do, so every node keeps `k` of each.
pub fn build_training_set(matrix: &SimilarityMatrix, k: usize, r: usize, seed: u64) -> Result<TrainingSet> {
    let n = matrix.node_count();
    if k == 0 || r == 0 {
        return Err(Error::config("k and r must be positive"));
    }
    let positives = (0..n).map(|v| sample_positives(matrix, v, k)).collect::<Result<Vec<_>>>()?;

    let mut negatives = vec![Vec::with_capacity(n); r];
    for (v, pos) in positives.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ v as u64);
        let pool = candidate_pool(n, v, pos);
        if pool.is_empty() {
            return Err(Error::config(format!("node {v} has no negative candidates: k = {k} covers every other node")));
        }
        for round in negatives.iter_mut() {
            let draw = if pool.len() >= k {
                sample_negatives(n, v, k, pos, &mut rng)?
            } else {
                (0..k).map(|_| pool[rng.gen_range(0..pool.len())]).collect()
            };
            round.push(draw);
        }
    }
    Ok(TrainingSet { k, r, seed, positives, negatives })
}
