//! Gaussian node embeddings: parameters, energies and the ranking trainer.

mod energy;
mod train;

pub use energy::{energy_el, energy_kl, grad_el, grad_kl, is_spherical, Energy, Gaussian, PairGrad};
pub use train::{initialize, pair_loss, train, train_from, TrainReport};

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CovarianceMode {
    Diagonal,
    #[default]
    Spherical,
}

impl CovarianceMode {
    pub fn name(self) -> &'static str {
        match self {
            CovarianceMode::Diagonal => "diagonal",
            CovarianceMode::Spherical => "spherical",
        }
    }

    /// Stored covariance entries per node.
    pub fn width(self, dim: usize) -> usize {
        match self {
            CovarianceMode::Diagonal => dim,
            CovarianceMode::Spherical => 1,
        }
    }
}

impl std::fmt::Display for CovarianceMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CovarianceMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "diagonal" | "diag" => Ok(CovarianceMode::Diagonal),
            "spherical" | "spher" => Ok(CovarianceMode::Spherical),
            other => Err(format!("unknown covariance mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub energy: Energy,
    pub mode: CovarianceMode,
    pub dim: usize,
    pub margin: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Upper bound on every mean's L2 norm.
    pub mean_bound: f64,
    pub cov_min: f64,
    pub cov_max: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            energy: Energy::KlSymmetric,
            mode: CovarianceMode::Spherical,
            dim: 128,
            margin: 1.0,
            learning_rate: 0.05,
            epochs: 50,
            mean_bound: 2.0,
            cov_min: 0.05,
            cov_max: 5.0,
            seed: 7,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::config("dimension must be positive"));
        }
        if !(self.margin > 0.0) {
            return Err(Error::config("margin must be positive"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::config("learning rate must be positive"));
        }
        if !(self.mean_bound > 0.0) {
            return Err(Error::config("mean bound must be positive"));
        }
        if !(self.cov_min > 0.0 && self.cov_min < self.cov_max && self.cov_max.is_finite()) {
            return Err(Error::config(format!(
                "covariance bounds need 0 < c_min < c_max, got {} and {}",
                self.cov_min, self.cov_max
            )));
        }
        Ok(())
    }
}

/// One Gaussian per node, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianEmbedding {
    pub dim: usize,
    pub mode: CovarianceMode,
    /// `n x dim` means.
    pub means: Vec<f64>,
    /// `n x mode.width(dim)` covariance entries.
    pub covariances: Vec<f64>,
}

impl GaussianEmbedding {
    pub fn node_count(&self) -> usize {
        self.means.len() / self.dim
    }

    pub fn mean(&self, i: usize) -> &[f64] {
        &self.means[i * self.dim..(i + 1) * self.dim]
    }

    pub fn cov(&self, i: usize) -> &[f64] {
        let w = self.mode.width(self.dim);
        &self.covariances[i * w..(i + 1) * w]
    }

    pub fn gaussian(&self, i: usize) -> Gaussian<'_> {
        Gaussian::new(self.mean(i), self.cov(i))
    }

    /// tr(Σ_i): the diagonal sum, or `d · σ²` in spherical mode.
    pub fn trace(&self, i: usize) -> f64 {
        match self.mode {
            CovarianceMode::Diagonal => self.cov(i).iter().sum(),
            CovarianceMode::Spherical => self.dim as f64 * self.cov(i)[0],
        }
    }

    /// Rescales means longer than `bound` and clamps covariance entries
    /// into `[cov_min, cov_max]`.
    pub fn project(&mut self, bound: f64, cov_min: f64, cov_max: f64) {
        for mean in self.means.chunks_mut(self.dim) {
            project_mean(mean, bound);
        }
        for c in &mut self.covariances {
            *c = c.clamp(cov_min, cov_max);
        }
    }

    /// Checks both parameter constraints, with a small tolerance on the norm.
    pub fn satisfies_bounds(&self, bound: f64, cov_min: f64, cov_max: f64) -> bool {
        let norms_ok =
            self.means.chunks(self.dim).all(|m| m.iter().map(|x| x * x).sum::<f64>().sqrt() <= bound * (1.0 + 1e-12));
        norms_ok && self.covariances.iter().all(|&c| c >= cov_min && c <= cov_max)
    }

    /// Writes the header `n d mode` followed by
    /// `token<TAB>μ_1 .. μ_d<TAB>cov entries` per node.
    pub fn write<W: Write>(&self, graph: &Graph, mut out: W) -> Result<()> {
        writeln!(out, "{} {} {}", self.node_count(), self.dim, self.mode)?;
        for i in 0..self.node_count() {
            writeln!(out, "{}\t{}\t{}", graph.token(i), join(self.mean(i)), join(self.cov(i)))?;
        }
        Ok(())
    }

    /// Writes `token<TAB>μ_1<TAB>..<TAB>μ_d` per node, no header.
    pub fn write_means<W: Write>(&self, graph: &Graph, mut out: W) -> Result<()> {
        for i in 0..self.node_count() {
            let cols: Vec<String> = self.mean(i).iter().map(|x| x.to_string()).collect();
            writeln!(out, "{}\t{}", graph.token(i), cols.join("\t"))?;
        }
        Ok(())
    }

    /// Reads the format written by [`GaussianEmbedding::write`]; returns the
    /// node tokens alongside.
    pub fn read<R: BufRead>(reader: R) -> Result<(Vec<String>, GaussianEmbedding)> {
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty embedding file"))?;
        let header = header?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(1, "header must be `n d mode`"));
        }
        let n: usize = fields[0].parse().map_err(|_| Error::parse(1, "bad node count"))?;
        let dim: usize = fields[1].parse().map_err(|_| Error::parse(1, "bad dimension"))?;
        let mode: CovarianceMode = fields[2].parse().map_err(|e: String| Error::parse(1, e))?;
        let width = mode.width(dim);

        let mut tokens = Vec::with_capacity(n);
        let mut means = Vec::with_capacity(n * dim);
        let mut covariances = Vec::with_capacity(n * width);
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split('\t').collect();
            if parts.len() != 3 {
                return Err(Error::parse(idx + 1, "expected token<TAB>means<TAB>covariances"));
            }
            let parse = |s: &str, expect: usize, what: &str| -> Result<Vec<f64>> {
                let vals: std::result::Result<Vec<f64>, _> = s.split_whitespace().map(str::parse).collect();
                let vals = vals.map_err(|_| Error::parse(idx + 1, format!("bad {what} value")))?;
                if vals.len() != expect {
                    return Err(Error::parse(idx + 1, format!("expected {expect} {what} values, got {}", vals.len())));
                }
                Ok(vals)
            };
            tokens.push(parts[0].to_owned());
            means.extend(parse(parts[1], dim, "mean")?);
            covariances.extend(parse(parts[2], width, "covariance")?);
        }
        if tokens.len() != n {
            return Err(Error::Input(format!("header says {n} nodes, found {}", tokens.len())));
        }
        Ok((tokens, GaussianEmbedding { dim, mode, means, covariances }))
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub(crate) fn project_mean(mean: &mut [f64], bound: f64) {
    let norm = mean.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > bound {
        let scale = bound / norm;
        mean.iter_mut().for_each(|x| *x *= scale);
    }
}

/// Average of tr(Σ_i) over all nodes.
pub fn mean_covariance_trace(embedding: &GaussianEmbedding) -> f64 {
    let n = embedding.node_count();
    if n == 0 {
        return 0.0;
    }
    (0..n).map(|i| embedding.trace(i)).sum::<f64>() / n as f64
}
