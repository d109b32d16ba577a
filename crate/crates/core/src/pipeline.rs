//! In-memory similarity → sampling → training pipeline.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::evaluation::{evaluate, Clustering, EvaluationReport};
use crate::gauss::{train, GaussianEmbedding, TrainConfig, TrainReport};
use crate::graph::Graph;
use crate::sampling::{build_training_set, TrainingSet};
use crate::similarity::{compute, Measure, SimilarityConfig, SimilarityMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub measure: Measure,
    pub similarity: SimilarityConfig,
    /// Positives (and negatives) per node.
    pub k: usize,
    /// Sampling rounds per node.
    pub r: usize,
    /// Seeds sampling, initialisation and K-means. Overrides `train.seed`.
    pub seed: u64,
    pub train: TrainConfig,
    pub kmeans_restarts: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            measure: Measure::RoleSim,
            similarity: SimilarityConfig::default(),
            k: 120,
            r: 20,
            seed: 7,
            train: TrainConfig::default(),
            kmeans_restarts: 10,
        }
    }
}

impl PipelineConfig {
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig { seed: self.seed, ..self.train.clone() }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub similarity: SimilarityMatrix,
    pub training_set: TrainingSet,
    pub embedding: GaussianEmbedding,
    pub train_report: TrainReport,
}

pub fn run(graph: &Graph, config: &PipelineConfig) -> Result<PipelineOutput> {
    let similarity = compute(graph, config.measure, &config.similarity)?;
    run_from_similarity(similarity, config)
}

/// Runs sampling and training on an already computed similarity matrix.
pub fn run_from_similarity(similarity: SimilarityMatrix, config: &PipelineConfig) -> Result<PipelineOutput> {
    let training_set = build_training_set(&similarity, config.k, config.r, config.seed)?;
    let (embedding, train_report) = train(&training_set, &config.train_config())?;
    Ok(PipelineOutput { similarity, training_set, embedding, train_report })
}

/// Runs the pipeline and clusters the means into as many groups as `labels` has.
pub fn run_and_score(
    graph: &Graph,
    labels: &Clustering,
    config: &PipelineConfig,
) -> Result<(PipelineOutput, EvaluationReport)> {
    let out = run(graph, config)?;
    let report = evaluate(&out.embedding, Some(graph), Some(labels), None, config.kmeans_restarts, config.seed)?;
    Ok((out, report))
}
