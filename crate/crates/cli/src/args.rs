use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rolegauss::pipeline::PipelineConfig;
use rolegauss::similarity::MatchingMode;
use rolegauss::{CovarianceMode, Energy, Error, Measure, SimilarityConfig, TrainConfig};

#[derive(Parser, Debug)]
#[command(name = "rolegauss", version, about = "Gaussian node embeddings from structural similarity")]
pub struct Cli {
    /// File of `key = value` lines; flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute a pairwise similarity matrix.
    Similarity(SimilarityCmd),
    /// Similarity, sampling, training and evaluation into one directory.
    Embed(EmbedCmd),
    /// Cluster an embedding and score it.
    Evaluate(EvaluateCmd),
    /// Write a synthetic graph and its labels.
    Synth(SynthCmd),
    /// NMI for each value of one parameter.
    Sweep(SweepCmd),
    /// Mean covariance trace as random edges are added to a blockmodel.
    Uncertainty(UncertaintyCmd),
    /// Rerun an `embed` manifest and compare artifact digests.
    Replay(ReplayCmd),
}

#[derive(Args, Debug, Clone)]
pub struct SimilarityArgs {
    #[arg(long, default_value_t = Measure::RoleSim)]
    pub measure: Measure,
    #[arg(long, default_value_t = SimilarityConfig::default().beta)]
    pub beta: f64,
    #[arg(long, default_value_t = SimilarityConfig::default().simrank_c)]
    pub simrank_c: f64,
    #[arg(long, default_value_t = SimilarityConfig::default().epsilon)]
    pub epsilon: f64,
    #[arg(long, default_value_t = SimilarityConfig::default().max_iterations)]
    pub max_iterations: usize,
    /// Fix pairs whose degree ratio exceeds this at zero.
    #[arg(long)]
    pub prune_ratio: Option<f64>,
    /// exact, greedy or auto.
    #[arg(long, default_value = "auto")]
    pub matching: MatchingMode,
    /// Workers for similarity rows and K-means restarts.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

impl SimilarityArgs {
    pub fn config(&self) -> SimilarityConfig {
        SimilarityConfig {
            beta: self.beta,
            simrank_c: self.simrank_c,
            epsilon: self.epsilon,
            max_iterations: self.max_iterations,
            degree_prune_ratio: self.prune_ratio,
            matching_mode: self.matching,
            threads: self.threads,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct TrainArgs {
    /// el, kl or kl_directed.
    #[arg(long, default_value_t = TrainConfig::default().energy)]
    pub energy: Energy,
    #[arg(long, default_value_t = TrainConfig::default().mode)]
    pub covariance: CovarianceMode,
    #[arg(long, default_value_t = TrainConfig::default().dim)]
    pub dim: usize,
    #[arg(long, default_value_t = TrainConfig::default().margin)]
    pub margin: f64,
    #[arg(long, default_value_t = TrainConfig::default().learning_rate)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = TrainConfig::default().epochs)]
    pub epochs: usize,
    #[arg(long, default_value_t = TrainConfig::default().mean_bound)]
    pub mean_bound: f64,
    #[arg(long, default_value_t = TrainConfig::default().cov_min)]
    pub cov_min: f64,
    #[arg(long, default_value_t = TrainConfig::default().cov_max)]
    pub cov_max: f64,
}

#[derive(Args, Debug, Clone)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub similarity: SimilarityArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    /// Positives and negatives per node.
    #[arg(long, default_value_t = PipelineConfig::default().k)]
    pub k: usize,
    /// Sampling rounds per node.
    #[arg(long, default_value_t = PipelineConfig::default().r)]
    pub r: usize,
    #[arg(long, default_value_t = PipelineConfig::default().seed)]
    pub seed: u64,
    /// K-means restarts.
    #[arg(long, default_value_t = PipelineConfig::default().kmeans_restarts)]
    pub restarts: usize,
}

impl PipelineArgs {
    pub fn config(&self) -> PipelineConfig {
        let t = &self.train;
        PipelineConfig {
            measure: self.similarity.measure,
            similarity: self.similarity.config(),
            k: self.k,
            r: self.r,
            seed: self.seed,
            train: TrainConfig {
                energy: t.energy,
                mode: t.covariance,
                dim: t.dim,
                margin: t.margin,
                learning_rate: t.learning_rate,
                epochs: t.epochs,
                mean_bound: t.mean_bound,
                cov_min: t.cov_min,
                cov_max: t.cov_max,
                seed: self.seed,
            },
            kmeans_restarts: self.restarts,
        }
    }
}

#[derive(Args, Debug)]
pub struct SimilarityCmd {
    #[arg(long)]
    pub graph: PathBuf,
    /// TSV output; run statistics go to the same name with a .json extension.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub similarity: SimilarityArgs,
}

#[derive(Args, Debug)]
pub struct EmbedCmd {
    #[arg(long)]
    pub graph: PathBuf,
    /// `token label` lines; enables NMI in the report.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Cluster count for goodness-of-fit.
    #[arg(long)]
    pub groups: Option<usize>,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Args, Debug)]
pub struct EvaluateCmd {
    #[arg(long)]
    pub embedding: PathBuf,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Edge list; needed for goodness-of-fit.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub groups: Option<usize>,
    #[arg(long, default_value_t = PipelineConfig::default().kmeans_restarts)]
    pub restarts: usize,
    #[arg(long, default_value_t = PipelineConfig::default().seed)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// Ten-node periphery/star/bridge graph.
    Toy,
    /// Planted-partition blockmodel.
    Sbm,
    /// Four 50-node blocks that differ by role, not community.
    PlantedRole,
}

#[derive(Args, Debug)]
pub struct SynthCmd {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    /// Block sizes for `sbm`.
    #[arg(long, default_value = "50,50,50,50")]
    pub blocks: ValueList,
    #[arg(long, default_value_t = rolegauss::graph::SbmSpec::DEFAULT_P_IN)]
    pub p_in: f64,
    #[arg(long, default_value_t = rolegauss::graph::SbmSpec::DEFAULT_P_OUT)]
    pub p_out: f64,
    /// Extra uniformly random edges.
    #[arg(long, default_value_t = 0)]
    pub noise: usize,
    #[arg(long, default_value_t = PipelineConfig::default().seed)]
    pub seed: u64,
    /// Receives graph.edgelist and labels.tsv.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Dim,
    #[value(name = "samples_r", alias = "samples-r", alias = "r")]
    SamplesR,
    #[value(name = "positives_k", alias = "positives-k", alias = "k")]
    PositivesK,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Dim => "dim",
            SweepParam::SamplesR => "samples_r",
            SweepParam::PositivesK => "positives_k",
        }
    }
}

#[derive(Args, Debug)]
pub struct SweepCmd {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// `10,50,100` or an inclusive range `40..190:10`.
    #[arg(long)]
    pub values: ValueList,
    /// TSV output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Args, Debug)]
pub struct UncertaintyCmd {
    #[arg(long, default_value = "50,50,50,50")]
    pub blocks: ValueList,
    #[arg(long, default_value_t = rolegauss::graph::SbmSpec::DEFAULT_P_IN)]
    pub p_in: f64,
    #[arg(long, default_value_t = rolegauss::graph::SbmSpec::DEFAULT_P_OUT)]
    pub p_out: f64,
    /// Added edge counts, e.g. `0..1000:100`.
    #[arg(long, default_value = "0..1000:100")]
    pub noise_levels: ValueList,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Args, Debug)]
pub struct ReplayCmd {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Override the recorded worker count.
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Comma-separated integers, or an inclusive `start..end[:step]` range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueList(pub Vec<usize>);

impl FromStr for ValueList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("not a non-negative integer: {t:?}"));
        if let Some((start, rest)) = s.split_once("..") {
            let (end, step) = match rest.split_once(':') {
                Some((end, step)) => (num(end)?, num(step)?),
                None => (num(rest)?, 1),
            };
            let start = num(start)?;
            if step == 0 {
                return Err("range step must be positive".into());
            }
            if start > end {
                return Err(format!("empty range {s:?}"));
            }
            return Ok(ValueList((start..=end).step_by(step).collect()));
        }
        let values = s.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
        Ok(ValueList(values))
    }
}

/// Appends `--key value` for each config-file entry whose flag is absent
/// from `argv`. `true` becomes a bare flag and `false` is dropped.
pub fn merge_config_file(mut argv: Vec<OsString>) -> rolegauss::Result<Vec<OsString>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text =
        std::fs::read_to_string(&path).map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))?;
    let present: Vec<String> = argv
        .iter()
        .filter_map(|a| a.to_str())
        .filter(|a| a.starts_with("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_owned())
        .collect();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("{}:{}: expected key=value", path.display(), idx + 1)))?;
        let flag = format!("--{}", key.trim().replace('_', "-"));
        if flag == "--config" {
            return Err(Error::Config("config files cannot include other config files".into()));
        }
        if present.contains(&flag) {
            continue;
        }
        match value.trim() {
            "false" => {}
            "true" => argv.push(flag.into()),
            v => {
                argv.push(flag.into());
                argv.push(v.into());
            }
        }
    }
    Ok(argv)
}

fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut args = argv.iter().skip(1);
    while let Some(arg) = args.next() {
        let arg = arg.to_str()?;
        if arg == "--config" {
            return args.next().map(PathBuf::from);
        }
        if let Some(path) = arg.strip_prefix("--config=") {
            return Some(PathBuf::from(path));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_lists() {
        assert_eq!("10,50,100,200".parse::<ValueList>().unwrap().0, vec![10, 50, 100, 200]);
        assert_eq!("40..190:10".parse::<ValueList>().unwrap().0.len(), 16);
        assert_eq!("5..15".parse::<ValueList>().unwrap().0.len(), 11);
        assert_eq!("0..1000:100".parse::<ValueList>().unwrap().0.len(), 11);
        assert_eq!("7".parse::<ValueList>().unwrap().0, vec![7]);
        assert!("1..5:0".parse::<ValueList>().is_err());
        assert!("5..1".parse::<ValueList>().is_err());
        assert!("a,b".parse::<ValueList>().is_err());
    }

    #[test]
    fn defaults_match_library() {
        let cli = Cli::try_parse_from(["rolegauss", "embed", "--graph", "g", "--out-dir", "o"]).unwrap();
        let Command::Embed(cmd) = cli.command else { panic!("wrong subcommand") };
        assert_eq!(cmd.pipeline.config(), PipelineConfig::default());
    }

    #[test]
    fn sweep_param_spellings() {
        for s in ["samples_r", "samples-r", "r"] {
            assert_eq!(SweepParam::from_str(s, false).unwrap(), SweepParam::SamplesR);
        }
        assert_eq!(SweepParam::from_str("positives_k", false).unwrap(), SweepParam::PositivesK);
    }
}
