//! Max-margin ranking trainer with AdaGrad and hard parameter constraints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{project_mean, GaussianEmbedding, PairGrad, TrainConfig};
use crate::error::{Error, Result};
use crate::sampling::TrainingSet;

const ADAGRAD_EPS: f64 = 1e-8;

/// Hinge on a (positive, negative) score pair: `max(0, m - e_p + e_n)`.
#[inline]
pub fn pair_loss(positive: f64, negative: f64, margin: f64) -> f64 {
    (margin - positive + negative).max(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean hinge loss over all pairs, per epoch.
    pub epoch_losses: Vec<f64>,
    /// Pairs with a positive hinge, per epoch.
    pub active_pairs: Vec<usize>,
}

/// Seeded initial parameters: means uniform in (-0.05, 0.05) per
/// coordinate, covariances at the geometric mean of the bounds.
pub fn initialize(n: usize, config: &TrainConfig) -> GaussianEmbedding {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let means = (0..n * config.dim).map(|_| rng.gen_range(-0.05..0.05)).collect();
    let start = (config.cov_min * config.cov_max).sqrt();
    let mut e = GaussianEmbedding {
        dim: config.dim,
        mode: config.mode,
        means,
        covariances: vec![start; n * config.mode.width(config.dim)],
    };
    e.project(config.mean_bound, config.cov_min, config.cov_max);
    e
}

/// Trains from [`initialize`]d parameters.
pub fn train(set: &TrainingSet, config: &TrainConfig) -> Result<(GaussianEmbedding, TrainReport)> {
    config.validate()?;
    train_from(initialize(set.node_count(), config), set, config)
}

/// Runs `config.epochs` passes over `set`, starting from `initial`.
///
/// One pass visits every round in order, every node, and pairs the i-th
/// positive with the i-th negative. Only pairs with a positive hinge update
/// parameters. Touched parameters are projected after every update and the
/// whole embedding again at the end of each epoch.
pub fn train_from(
    initial: GaussianEmbedding,
    set: &TrainingSet,
    config: &TrainConfig,
) -> Result<(GaussianEmbedding, TrainReport)> {
    config.validate()?;
    if set.is_empty() {
        return Err(Error::config("empty training set"));
    }
    if initial.dim != config.dim || initial.mode != config.mode || initial.node_count() != set.node_count() {
        return Err(Error::config("initial embedding does not match the configuration"));
    }
    let mut trainer = Trainer::new(initial, config);
    let mut report = TrainReport { epoch_losses: Vec::new(), active_pairs: Vec::new() };
    let pairs = set.pair_count() as f64;

    for _ in 0..config.epochs {
        let mut loss = 0.0;
        let mut active = 0;
        for round in &set.negatives {
            for (v, (pos, neg)) in set.positives.iter().zip(round).enumerate() {
                for (&p, &q) in pos.iter().zip(neg) {
                    let l = trainer.step(v, p, q);
                    if l > 0.0 {
                        loss += l;
                        active += 1;
                    }
                }
            }
        }
        if !loss.is_finite() {
            return Err(Error::Numerical("training loss is not finite".into()));
        }
        trainer.emb.project(config.mean_bound, config.cov_min, config.cov_max);
        debug_assert!(trainer.emb.satisfies_bounds(config.mean_bound, config.cov_min, config.cov_max));
        report.epoch_losses.push(loss / pairs);
        report.active_pairs.push(active);
    }
    Ok((trainer.emb, report))
}

struct Trainer<'a> {
    emb: GaussianEmbedding,
    config: &'a TrainConfig,
    mean_hist: Vec<f64>,
    cov_hist: Vec<f64>,
    pos: PairGrad,
    neg: PairGrad,
    // combined gradient for the anchor node
    anchor_mean: Vec<f64>,
    anchor_cov: Vec<f64>,
}

impl<'a> Trainer<'a> {
    fn new(emb: GaussianEmbedding, config: &'a TrainConfig) -> Self {
        let width = config.mode.width(config.dim);
        Trainer {
            mean_hist: vec![0.0; emb.means.len()],
            cov_hist: vec![0.0; emb.covariances.len()],
            emb,
            config,
            pos: PairGrad::default(),
            neg: PairGrad::default(),
            anchor_mean: vec![0.0; config.dim],
            anchor_cov: vec![0.0; width],
        }
    }

    /// One hinge update on anchor `v`, positive `p`, negative `q`; returns the loss.
    fn step(&mut self, v: usize, p: usize, q: usize) -> f64 {
        let energy = self.config.energy;
        let sp = energy.score(self.emb.gaussian(v), self.emb.gaussian(p));
        let sn = energy.score(self.emb.gaussian(v), self.emb.gaussian(q));
        let loss = pair_loss(sp, sn, self.config.margin);
        if loss <= 0.0 {
            return loss;
        }
        energy.score_grad(self.emb.gaussian(v), self.emb.gaussian(p), &mut self.pos);
        energy.score_grad(self.emb.gaussian(v), self.emb.gaussian(q), &mut self.neg);

        // d loss = -d score(v, p) + d score(v, q)
        for (a, (gp, gn)) in self.anchor_mean.iter_mut().zip(self.pos.mean_i.iter().zip(&self.neg.mean_i)) {
            *a = gn - gp;
        }
        for (a, (gp, gn)) in self.anchor_cov.iter_mut().zip(self.pos.cov_i.iter().zip(&self.neg.cov_i)) {
            *a = gn - gp;
        }

        let (dim, width) = (self.config.dim, self.config.mode.width(self.config.dim));
        let alpha = self.config.learning_rate;
        let (lo, hi, bound) = (self.config.cov_min, self.config.cov_max, self.config.mean_bound);

        let updates: [(usize, f64, &[f64], &[f64]); 3] = [
            (v, 1.0, &self.anchor_mean, &self.anchor_cov),
            (p, -1.0, &self.pos.mean_j, &self.pos.cov_j),
            (q, 1.0, &self.neg.mean_j, &self.neg.cov_j),
        ];
        for (node, sign, gmean, gcov) in updates {
            let mean = &mut self.emb.means[node * dim..(node + 1) * dim];
            let hist = &mut self.mean_hist[node * dim..(node + 1) * dim];
            adagrad(mean, hist, gmean, sign, alpha);
            project_mean(mean, bound);

            let cov = &mut self.emb.covariances[node * width..(node + 1) * width];
            let hist = &mut self.cov_hist[node * width..(node + 1) * width];
            adagrad(cov, hist, gcov, sign, alpha);
            cov.iter_mut().for_each(|c| *c = c.clamp(lo, hi));
        }
        loss
    }
}

#[inline]
fn adagrad(params: &mut [f64], hist: &mut [f64], grad: &[f64], sign: f64, alpha: f64) {
    for ((x, h), &g) in params.iter_mut().zip(hist.iter_mut()).zip(grad) {
        let g = sign * g;
        *h += g * g;
        *x -= alpha * g / (h.sqrt() + ADAGRAD_EPS);
    }
}
