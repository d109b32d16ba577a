//! Clustering-based evaluation of node embeddings.

mod gof;
mod kmeans;
mod nmi;
mod sweep;

pub use gof::goodness_of_fit;
pub use kmeans::{kmeans, KMeansResult};
pub use nmi::{entropy, mutual_information, nmi};
pub use sweep::{spearman, uncertainty_sweep, write_sweep_tsv, SweepRow};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{mean_covariance_trace, GaussianEmbedding};
use crate::graph::Graph;

/// Hard partition of `0..n` into `groups` clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clustering {
    pub assignment: Vec<usize>,
    pub groups: usize,
}

impl Clustering {
    pub fn new(assignment: Vec<usize>, groups: usize) -> Result<Self> {
        if let Some(&bad) = assignment.iter().find(|&&c| c >= groups) {
            return Err(Error::Input(format!("cluster id {bad} out of range for {groups} groups")));
        }
        Ok(Clustering { assignment, groups })
    }

    /// Numbers distinct labels in order of first appearance.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Self {
        let mut ids: Vec<&str> = Vec::new();
        let assignment = labels
            .iter()
            .map(|l| {
                let l = l.as_ref();
                ids.iter().position(|&x| x == l).unwrap_or_else(|| {
                    ids.push(l);
                    ids.len() - 1
                })
            })
            .collect();
        Clustering { assignment, groups: ids.len() }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.groups];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nmi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gof: Option<f64>,
    pub mean_cov_trace: f64,
    pub clustering: Clustering,
}

/// Clusters the embedding means and scores the result.
///
/// The cluster count is `groups` when given, else the number of distinct
/// labels; one of the two is required. NMI is reported iff `labels` is given,
/// goodness-of-fit iff `groups` is given (it then needs `graph`).
pub fn evaluate(
    embedding: &GaussianEmbedding,
    graph: Option<&Graph>,
    labels: Option<&Clustering>,
    groups: Option<usize>,
    restarts: usize,
    seed: u64,
) -> Result<EvaluationReport> {
    let g = match (groups, labels) {
        (Some(g), _) => g,
        (None, Some(l)) => l.groups,
        (None, None) => return Err(Error::config("need either labels or a group count")),
    };
    let n = embedding.node_count();
    let km = kmeans(&embedding.means, embedding.dim, g, restarts, seed)?;
    let nmi = labels
        .map(|l| {
            if l.len() != n {
                return Err(Error::Input(format!("{} labels for {n} nodes", l.len())));
            }
            nmi(&km.clustering, l)
        })
        .transpose()?;
    let gof = match groups {
        Some(_) => {
            let graph = graph.ok_or_else(|| Error::config("goodness-of-fit needs the graph"))?;
            Some(goodness_of_fit(graph, &km.clustering)?)
        }
        None => None,
    };
    Ok(EvaluationReport { nmi, gof, mean_cov_trace: mean_covariance_trace(embedding), clustering: km.clustering })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_numbered_by_first_appearance() {
        let c = Clustering::from_labels(&["b", "a", "b", "c"]);
        assert_eq!(c.assignment, vec![0, 1, 0, 2]);
        assert_eq!(c.groups, 3);
        assert_eq!(c.sizes(), vec![2, 1, 1]);
    }

    #[test]
    fn out_of_range_cluster() {
        assert!(Clustering::new(vec![0, 2], 2).is_err());
    }

    #[test]
    fn report_fields_follow_inputs() {
        let emb = GaussianEmbedding {
            dim: 1,
            mode: crate::gauss::CovarianceMode::Spherical,
            means: vec![0.0, 0.1, 5.0, 5.1],
            covariances: vec![1.0; 4],
        };
        let graph = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let labels = Clustering::from_labels(&["x", "x", "y", "y"]);
        let r = evaluate(&emb, None, Some(&labels), None, 3, 0).unwrap();
        assert_eq!(r.nmi, Some(1.0));
        assert!(r.gof.is_none());
        let r = evaluate(&emb, Some(&graph), None, Some(2), 3, 0).unwrap();
        assert!(r.nmi.is_none());
        assert_eq!(r.gof, Some(0.0));
        assert!(evaluate(&emb, None, None, Some(2), 3, 0).is_err());
        assert!(evaluate(&emb, None, None, None, 3, 0).is_err());
    }
}
