//! The `embed` pipeline with per-stage artifacts, a run manifest and replay.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rolegauss::evaluation::{evaluate, Clustering};
use rolegauss::gauss::{mean_covariance_trace, train};
use rolegauss::graph::load_labels;
use rolegauss::pipeline::PipelineConfig;
use rolegauss::sampling::build_training_set;
use rolegauss::similarity::compute;
use rolegauss::{Error, Graph, Measure, SimilarityConfig, SimilarityMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Failure, Result};
use crate::output::{file_digest, load_graph, open_input, read_json, sha256_hex, write_atomic, write_json};

pub const MANIFEST: &str = "manifest.json";
pub const SIMILARITY_TSV: &str = "similarity.tsv";
pub const SIMILARITY_META: &str = "similarity.json";
pub const TRAINING_TSV: &str = "training.tsv";
pub const EMBEDDING: &str = "embedding.txt";
pub const MEANS: &str = "means.tsv";
pub const CLUSTERS: &str = "clusters.tsv";
pub const REPORT: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedConfig {
    pub pipeline: PipelineConfig,
    /// Cluster count for goodness-of-fit; labels alone give NMI only.
    pub groups: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub seconds: f64,
    #[serde(default)]
    pub cached: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Running,
    Ok,
    Failed,
}

/// Everything needed to rerun an `embed` invocation bit for bit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed_stage: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub seed: u64,
    pub config: EmbedConfig,
    pub inputs: BTreeMap<String, InputFile>,
    pub stages: Vec<StageRecord>,
    /// Artifact file name to SHA-256 of its contents.
    pub artifacts: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimilarityMeta {
    pub measure: Measure,
    pub iterations_run: usize,
    pub final_delta: f64,
    /// Digest of the graph bytes, measure and similarity settings.
    pub cache_key: String,
    /// Digest of the TSV this sidecar describes.
    pub sha256: String,
}

#[derive(Debug, Serialize)]
struct Report<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    nmi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gof: Option<f64>,
    mean_cov_trace: f64,
    epoch_losses: &'a [f64],
}

#[derive(Debug, Clone)]
pub struct Inputs {
    pub graph: PathBuf,
    pub labels: Option<PathBuf>,
}

/// Cache key for a similarity computation. The worker count is left out
/// because it does not change the result.
pub fn cache_key(graph_sha: &str, measure: Measure, config: &SimilarityConfig) -> String {
    let config = SimilarityConfig { threads: 1, ..config.clone() };
    let settings = serde_json::to_string(&config).expect("config serialises");
    sha256_hex(format!("{graph_sha}\n{measure}\n{settings}").as_bytes())
}

/// Computes `measure`, or reloads `tsv` when its sidecar carries the same
/// cache key and the file is intact. Returns the matrix, its sidecar and
/// whether it was reloaded.
pub fn similarity_stage(
    graph: &Graph,
    graph_sha: &str,
    measure: Measure,
    config: &SimilarityConfig,
    tsv: &Path,
) -> Result<(SimilarityMatrix, SimilarityMeta, bool)> {
    let key = cache_key(graph_sha, measure, config);
    let sidecar = tsv.with_extension("json");
    if let Ok(meta) = read_json::<SimilarityMeta>(&sidecar) {
        if meta.cache_key == key && file_digest(tsv).ok().as_deref() == Some(meta.sha256.as_str()) {
            let mut m = SimilarityMatrix::read_tsv(open_input(tsv)?, graph, measure)?;
            m.iterations_run = meta.iterations_run;
            m.final_delta = meta.final_delta;
            return Ok((m, meta, true));
        }
    }
    let m = compute(graph, measure, config)?;
    let sha256 = write_atomic(tsv, |buf| m.write_tsv(graph, buf))?;
    let meta = SimilarityMeta {
        measure,
        iterations_run: m.iterations_run,
        final_delta: m.final_delta,
        cache_key: key,
        sha256,
    };
    write_json(&sidecar, &meta)?;
    Ok((m, meta, false))
}

struct Run<'a> {
    dir: &'a Path,
    manifest: RunManifest,
    stage: &'static str,
    started: Instant,
}

impl<'a> Run<'a> {
    fn begin(&mut self, stage: &'static str) {
        self.stage = stage;
        self.started = Instant::now();
    }

    fn end(&mut self, cached: bool) {
        self.manifest.stages.push(StageRecord {
            name: self.stage.to_owned(),
            seconds: self.started.elapsed().as_secs_f64(),
            cached,
        });
    }

    fn write<F>(&mut self, name: &str, body: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> rolegauss::Result<()>,
    {
        let digest = write_atomic(&self.dir.join(name), body)?;
        self.manifest.artifacts.insert(name.to_owned(), digest);
        Ok(())
    }

    fn write_manifest(&self) -> Result<()> {
        write_json(&self.dir.join(MANIFEST), &self.manifest)?;
        Ok(())
    }

    fn input(&mut self, role: &str, path: &Path, sha256: String) {
        let path = fs::canonicalize(path).unwrap_or_else(|_| path.to_owned());
        self.manifest.inputs.insert(role.to_owned(), InputFile { path, sha256 });
    }

    fn execute(&mut self, inputs: &Inputs) -> Result<()> {
        let config = self.manifest.config.clone();
        let p = &config.pipeline;
        p.similarity.validate()?;
        p.train_config().validate()?;

        self.begin("load");
        let (graph, graph_sha) = load_graph(&inputs.graph)?;
        self.input("graph", &inputs.graph, graph_sha.clone());
        let labels = match &inputs.labels {
            Some(path) => {
                let sha = file_digest(path)?;
                let labels = load_labels(open_input(path)?, &graph)?;
                self.input("labels", path, sha);
                Some(Clustering::from_labels(&labels))
            }
            None => None,
        };
        self.end(false);

        self.begin("similarity");
        let tsv = self.dir.join(SIMILARITY_TSV);
        let (similarity, meta, cached) = similarity_stage(&graph, &graph_sha, p.measure, &p.similarity, &tsv)?;
        self.manifest.artifacts.insert(SIMILARITY_TSV.to_owned(), meta.sha256.clone());
        let sidecar_sha = file_digest(&self.dir.join(SIMILARITY_META))?;
        self.manifest.artifacts.insert(SIMILARITY_META.to_owned(), sidecar_sha);
        self.end(cached);

        self.begin("sampling");
        let set = build_training_set(&similarity, p.k, p.r, p.seed)?;
        drop(similarity);
        self.write(TRAINING_TSV, |buf| set.write_tsv(&graph, buf))?;
        self.end(false);

        self.begin("training");
        let (embedding, train_report) = train(&set, &p.train_config())?;
        self.write(EMBEDDING, |buf| embedding.write(&graph, buf))?;
        self.write(MEANS, |buf| embedding.write_means(&graph, buf))?;
        self.end(false);

        self.begin("evaluation");
        let (nmi, gof) = if labels.is_some() || config.groups.is_some() {
            let pool = crate::output::pool(p.similarity.threads)?;
            let report = pool.install(|| {
                evaluate(&embedding, Some(&graph), labels.as_ref(), config.groups, p.kmeans_restarts, p.seed)
            })?;
            let assignment = &report.clustering.assignment;
            self.write(CLUSTERS, |buf| {
                use std::io::Write;
                for (u, c) in assignment.iter().enumerate() {
                    writeln!(buf, "{}\t{c}", graph.token(u))?;
                }
                Ok(())
            })?;
            (report.nmi, report.gof)
        } else {
            (None, None)
        };
        let report = Report {
            nmi,
            gof,
            mean_cov_trace: mean_covariance_trace(&embedding),
            epoch_losses: &train_report.epoch_losses,
        };
        self.write(REPORT, |buf| {
            serde_json::to_writer_pretty(&mut *buf, &report).map_err(|e| Error::Input(e.to_string()))?;
            buf.push(b'\n');
            Ok(())
        })?;
        self.end(false);
        Ok(())
    }
}

/// Runs the full pipeline into `out_dir` and writes `manifest.json` there.
///
/// On failure the manifest is still written, with status `failed`, the
/// stage that failed and the error; artifacts from earlier stages are left
/// in place and listed.
pub fn run_embed(inputs: &Inputs, config: &EmbedConfig, out_dir: &Path) -> Result<RunManifest> {
    fs::create_dir_all(out_dir)?;
    let mut run = Run {
        dir: out_dir,
        manifest: RunManifest {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            status: Status::Running,
            failed_stage: None,
            error: None,
            seed: config.pipeline.seed,
            config: config.clone(),
            inputs: BTreeMap::new(),
            stages: Vec::new(),
            artifacts: BTreeMap::new(),
        },
        stage: "config",
        started: Instant::now(),
    };
    match run.execute(inputs) {
        Ok(()) => {
            run.manifest.status = Status::Ok;
            run.write_manifest()?;
            Ok(run.manifest)
        }
        Err(e) => {
            run.manifest.status = Status::Failed;
            run.manifest.failed_stage = Some(run.stage.to_owned());
            run.manifest.error = Some(e.to_string());
            // the original error is more useful than a failure to record it
            let _ = run.write_manifest();
            Err(e)
        }
    }
}

/// Per-artifact outcome of a replay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtifactCheck {
    pub name: String,
    pub matches: bool,
}

/// Reruns the `embed` recorded in `manifest_path` into `out_dir` and compares
/// every artifact digest with the recorded one.
pub fn replay(manifest_path: &Path, out_dir: &Path, threads: Option<usize>) -> Result<Vec<ArtifactCheck>> {
    let recorded: RunManifest = read_json(manifest_path)?;
    if recorded.status != Status::Ok {
        return Err(Error::Input(format!("{} records a run that did not finish", manifest_path.display())).into());
    }
    for (role, input) in &recorded.inputs {
        let digest = file_digest(&input.path)?;
        if digest != input.sha256 {
            return Err(Error::Input(format!("{role} input {} changed since the run", input.path.display())).into());
        }
    }
    let graph = recorded.inputs.get("graph").ok_or_else(|| Error::Input("manifest lists no graph input".into()))?;
    let inputs = Inputs { graph: graph.path.clone(), labels: recorded.inputs.get("labels").map(|f| f.path.clone()) };
    let mut config = recorded.config.clone();
    if let Some(t) = threads {
        config.pipeline.similarity.threads = t;
    }
    let rerun = run_embed(&inputs, &config, out_dir)?;

    let mut names: Vec<&String> = recorded.artifacts.keys().chain(rerun.artifacts.keys()).collect();
    names.sort();
    names.dedup();
    let checks: Vec<ArtifactCheck> = names
        .into_iter()
        .map(|name| ArtifactCheck {
            name: name.clone(),
            matches: recorded.artifacts.get(name).is_some()
                && recorded.artifacts.get(name) == rerun.artifacts.get(name),
        })
        .collect();
    let bad: Vec<String> = checks.iter().filter(|c| !c.matches).map(|c| c.name.clone()).collect();
    if !bad.is_empty() {
        for c in &checks {
            println!("{}\t{}", c.name, if c.matches { "ok" } else { "MISMATCH" });
        }
        return Err(Failure::Mismatch(bad));
    }
    Ok(checks)
}
