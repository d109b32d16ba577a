//! Gaussian node embeddings that preserve global structural roles.
//!
//! The pipeline has four stages, each in its own module:
//!
//! 1. [`similarity`]: pairwise structural similarity (RoleSim, SimRank, MatchSim).
//! 2. [`sampling`]: top-k positives and uniform negatives per node.
//! 3. [`gauss`]: a max-margin ranking trainer over Gaussian node distributions.
//! 4. [`evaluation`]: K-means, NMI, goodness-of-fit and covariance traces.
//!
//! [`graph`] holds the graph type, edge-list IO and synthetic generators, and
//! [`pipeline`] wires the stages together in memory.

pub mod error;
pub mod evaluation;
pub mod gauss;
pub mod graph;
pub mod pipeline;
pub mod sampling;
pub mod similarity;

pub use error::{Error, Result};
pub use gauss::{CovarianceMode, Energy, GaussianEmbedding, TrainConfig};
pub use graph::Graph;
pub use sampling::TrainingSet;
pub use similarity::{Measure, SimilarityConfig, SimilarityMatrix};
