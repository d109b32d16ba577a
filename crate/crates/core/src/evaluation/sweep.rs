use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gauss::mean_covariance_trace;
use crate::graph::{generate_sbm, SbmSpec};
use crate::pipeline::{self, PipelineConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub noise: usize,
    pub edges: usize,
    pub mean_cov_trace: f64,
}

/// Regenerates `base` at each noise level, runs the whole pipeline and
/// records the mean covariance trace.
pub fn uncertainty_sweep(base: &SbmSpec, noise_levels: &[usize], config: &PipelineConfig) -> Result<Vec<SweepRow>> {
    noise_levels
        .iter()
        .map(|&noise| {
            let spec = SbmSpec { noise_edges: noise, ..base.clone() };
            let (graph, _) = generate_sbm(&spec)?;
            let out = pipeline::run(&graph, config)?;
            Ok(SweepRow { noise, edges: graph.edge_count(), mean_cov_trace: mean_covariance_trace(&out.embedding) })
        })
        .collect()
}

/// `noise<TAB>edges<TAB>mean_cov_trace` with a header line.
pub fn write_sweep_tsv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "noise\tedges\tmean_cov_trace")?;
    for row in rows {
        writeln!(out, "{}\t{}\t{}", row.noise, row.edges, row.mean_cov_trace)?;
    }
    Ok(())
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "spearman needs paired samples");
    let (rx, ry) = (ranks(x), ranks(y));
    pearson(&rx, &ry)
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_basics() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]) - 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 1.0, 0.0]) + 1.0).abs() < 1e-12);
        // monotone but non-linear
        assert!((spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 8.0, 27.0, 64.0]) - 1.0).abs() < 1e-12);
        assert_eq!(ranks(&[5.0, 1.0, 5.0]), vec![2.5, 1.0, 2.5]);
    }

    #[test]
    fn single_level_gives_one_row() {
        let base = SbmSpec::planted(vec![6, 6], 0, 1);
        let mut config = PipelineConfig::default();
        config.k = 3;
        config.r = 2;
        config.train.dim = 2;
        config.train.epochs = 2;
        let rows = uncertainty_sweep(&base, &[0], &config).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].noise, 0);
        let mut buf = Vec::new();
        write_sweep_tsv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
    }
}
