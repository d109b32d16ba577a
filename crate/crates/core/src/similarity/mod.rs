//! Global structural similarity between every pair of nodes.
//!
//! All three measures share one fixed-point driver: each iteration reads the
//! frozen previous matrix and writes a fresh one, row by row. Rows are
//! independent, so they may be spread over a thread pool without changing
//! a single bit of the result.

mod matching;
mod matchsim;
mod prune;
mod rolesim;
mod simrank;

pub use matching::{greedy, hungarian, neighbor_matching, Matching, MatchingMode, Weights, AUTO_EXACT_LIMIT};
pub use matchsim::matchsim;
pub use prune::{apply_degree_pruning, is_pruned};
pub use rolesim::rolesim;
pub use simrank::simrank;

use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    #[default]
    RoleSim,
    SimRank,
    MatchSim,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::RoleSim => "rolesim",
            Measure::SimRank => "simrank",
            Measure::MatchSim => "matchsim",
        }
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Measure {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rolesim" => Ok(Measure::RoleSim),
            "simrank" => Ok(Measure::SimRank),
            "matchsim" => Ok(Measure::MatchSim),
            other => Err(format!("unknown similarity measure {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityConfig {
    /// RoleSim decay, in (0, 1).
    pub beta: f64,
    /// SimRank decay, in (0, 1).
    pub simrank_c: f64,
    /// Stop once the max-norm change between iterations drops below this.
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Pairs whose degree ratio exceeds this are fixed at 0 and skipped.
    pub degree_prune_ratio: Option<f64>,
    pub matching_mode: MatchingMode,
    /// Worker threads for row computation; 1 runs on the calling thread.
    pub threads: usize,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        SimilarityConfig {
            beta: 0.1,
            simrank_c: 0.8,
            epsilon: 1e-4,
            max_iterations: 100,
            degree_prune_ratio: None,
            matching_mode: MatchingMode::Auto,
            threads: 1,
        }
    }
}

impl SimilarityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::config(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        if !(self.simrank_c > 0.0 && self.simrank_c < 1.0) {
            return Err(Error::config(format!("simrank decay must lie in (0, 1), got {}", self.simrank_c)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::config("epsilon must be positive"));
        }
        if let Some(r) = self.degree_prune_ratio {
            if !(r > 1.0) {
                return Err(Error::config(format!("prune ratio must exceed 1, got {r}")));
            }
        }
        if self.threads == 0 {
            return Err(Error::config("threads must be at least 1"));
        }
        Ok(())
    }
}

/// Dense symmetric `n x n` similarity scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    n: usize,
    scores: Vec<f64>,
    pub measure: Measure,
    pub iterations_run: usize,
    /// Max absolute per-entry change at the last iteration.
    pub final_delta: f64,
    /// Max absolute change of every iteration, in order.
    pub deltas: Vec<f64>,
}

impl SimilarityMatrix {
    /// Wraps a precomputed row-major score buffer.
    pub fn from_scores(n: usize, scores: Vec<f64>, measure: Measure) -> Result<Self> {
        if scores.len() != n * n {
            return Err(Error::Input(format!("{} scores for {n} nodes", scores.len())));
        }
        Ok(SimilarityMatrix { n, scores, measure, iterations_run: 0, final_delta: 0.0, deltas: Vec::new() })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.scores[u * self.n + v]
    }

    pub fn set_symmetric(&mut self, u: usize, v: usize, value: f64) {
        self.scores[u * self.n + v] = value;
        self.scores[v * self.n + u] = value;
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.scores[u * self.n..(u + 1) * self.n]
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Writes `u<TAB>v<TAB>score` for `u <= v` using node tokens.
    ///
    /// Scores use the shortest round-trip float representation, so
    /// [`SimilarityMatrix::read_tsv`] restores them exactly.
    pub fn write_tsv<W: Write>(&self, graph: &Graph, mut out: W) -> Result<()> {
        for u in 0..self.n {
            let tu = graph.token(u);
            for v in u..self.n {
                writeln!(out, "{}\t{}\t{}", tu, graph.token(v), self.get(u, v))?;
            }
        }
        Ok(())
    }

    /// Reads the format of [`SimilarityMatrix::write_tsv`]. Missing pairs are 0.
    pub fn read_tsv<R: BufRead>(reader: R, graph: &Graph, measure: Measure) -> Result<Self> {
        let n = graph.node_count();
        let mut m = SimilarityMatrix::from_scores(n, vec![0.0; n * n], measure)?;
        let lookup: std::collections::HashMap<String, usize> = (0..n).map(|u| (graph.token(u), u)).collect();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split('\t').collect();
            if parts.len() != 3 {
                return Err(Error::parse(idx + 1, "expected u<TAB>v<TAB>score"));
            }
            let node = |t: &str| {
                lookup.get(t).copied().ok_or_else(|| Error::parse(idx + 1, format!("unknown node token {t:?}")))
            };
            let (u, v) = (node(parts[0])?, node(parts[1])?);
            let score: f64 =
                parts[2].trim().parse().map_err(|_| Error::parse(idx + 1, format!("bad score {:?}", parts[2])))?;
            m.set_symmetric(u, v, score);
        }
        Ok(m)
    }
}

/// Computes `measure` over `graph`.
pub fn compute(graph: &Graph, measure: Measure, config: &SimilarityConfig) -> Result<SimilarityMatrix> {
    match measure {
        Measure::RoleSim => rolesim(graph, config),
        Measure::SimRank => simrank(graph, config),
        Measure::MatchSim => matchsim(graph, config),
    }
}

/// Runs `step` from `init` until the max-norm change falls below
/// `config.epsilon` or `config.max_iterations` is reached.
pub(crate) fn iterate<F>(
    graph: &Graph,
    measure: Measure,
    config: &SimilarityConfig,
    init: Vec<f64>,
    step: F,
) -> Result<SimilarityMatrix>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    config.validate()?;
    if graph.is_empty() {
        return Err(Error::Input("similarity of an empty graph".into()));
    }
    let n = graph.node_count();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::config(e.to_string()))?;

    let mut prev = init;
    let mut next = vec![0.0; n * n];
    let mut deltas = Vec::new();
    for _ in 0..config.max_iterations {
        pool.install(|| step(&prev, &mut next));
        let delta = prev.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
        if !delta.is_finite() {
            return Err(Error::Numerical(format!("{measure} diverged")));
        }
        std::mem::swap(&mut prev, &mut next);
        deltas.push(delta);
        if delta < config.epsilon {
            break;
        }
    }
    Ok(SimilarityMatrix {
        n,
        scores: prev,
        measure,
        iterations_run: deltas.len(),
        final_delta: deltas.last().copied().unwrap_or(0.0),
        deltas,
    })
}

/// Fills the upper triangle of `next` row by row (in parallel when inside a
/// multi-threaded pool), sets the diagonal to 1, and mirrors.
///
/// Pairs pruned by `prune_ratio` are fixed at 0 and `pair` is not called.
pub(crate) fn fill_symmetric<F>(graph: &Graph, prune_ratio: Option<f64>, next: &mut [f64], pair: F)
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let n = graph.node_count();
    next.par_chunks_mut(n).enumerate().for_each(|(u, row)| {
        row[u] = 1.0;
        for v in (u + 1)..n {
            row[v] = match prune_ratio {
                Some(r) if is_pruned(graph.degree(u), graph.degree(v), r) => 0.0,
                _ => pair(u, v),
            };
        }
    });
    for u in 0..n {
        for v in 0..u {
            next[u * n + v] = next[v * n + u];
        }
    }
}

/// Gathers `prev[x][y]` for `x` in `N(u)`, `y` in `N(v)` into `buf`.
pub(crate) fn neighbor_weights(graph: &Graph, prev: &[f64], u: usize, v: usize, buf: &mut Vec<f64>) {
    let n = graph.node_count();
    buf.clear();
    for &x in graph.neighbors(u) {
        let row = &prev[x * n..(x + 1) * n];
        buf.extend(graph.neighbors(v).iter().map(|&y| row[y]));
    }
}
