use std::io::Write;
use std::path::Path;

use rolegauss::evaluation::{evaluate, uncertainty_sweep, write_sweep_tsv, Clustering};
use rolegauss::graph::{generate_role_toy, generate_sbm, load_labels, planted_role_spec, write_edge_list, SbmSpec};
use rolegauss::pipeline::run_from_similarity;
use rolegauss::similarity::compute;
use rolegauss::{Error, GaussianEmbedding, Graph};
use serde::Serialize;

use crate::args::{
    Command, EmbedCmd, EvaluateCmd, ReplayCmd, SimilarityCmd, SweepCmd, SweepParam, SynthCmd, SynthKind, UncertaintyCmd,
};
use crate::embed::{self, EmbedConfig, Inputs};
use crate::error::Result;
use crate::output::{load_graph, open_input, pool, write_atomic, write_json};

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Similarity(cmd) => similarity(cmd),
        Command::Embed(cmd) => embed(cmd),
        Command::Evaluate(cmd) => evaluate_cmd(cmd),
        Command::Synth(cmd) => synth(cmd),
        Command::Sweep(cmd) => sweep(cmd),
        Command::Uncertainty(cmd) => uncertainty(cmd),
        Command::Replay(cmd) => replay(cmd),
    }
}

fn similarity(cmd: SimilarityCmd) -> Result<()> {
    let (graph, sha) = load_graph(&cmd.graph)?;
    let config = cmd.similarity.config();
    let (_, meta, cached) = embed::similarity_stage(&graph, &sha, cmd.similarity.measure, &config, &cmd.out)?;
    eprintln!(
        "{}: {} iterations, final delta {:e}{}",
        meta.measure,
        meta.iterations_run,
        meta.final_delta,
        if cached { " (cached)" } else { "" }
    );
    Ok(())
}

fn embed(cmd: EmbedCmd) -> Result<()> {
    let inputs = Inputs { graph: cmd.graph, labels: cmd.labels };
    let config = EmbedConfig { pipeline: cmd.pipeline.config(), groups: cmd.groups };
    let manifest = embed::run_embed(&inputs, &config, &cmd.out_dir)?;
    for stage in &manifest.stages {
        eprintln!("{:<11} {:>8.3}s{}", stage.name, stage.seconds, if stage.cached { " cached" } else { "" });
    }
    Ok(())
}

#[derive(Serialize)]
struct EvaluateOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    nmi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gof: Option<f64>,
    mean_cov_trace: f64,
}

/// Graph and embedding over the same nodes, with embedding rows in graph order.
fn align(
    tokens: Vec<String>,
    embedding: GaussianEmbedding,
    graph: Option<Graph>,
) -> rolegauss::Result<(Graph, GaussianEmbedding)> {
    let Some(graph) = graph else {
        let n = tokens.len();
        return Ok((Graph::from_edges(n, [])?.with_labels(tokens)?, embedding));
    };
    if tokens.len() != graph.node_count() {
        return Err(Error::Input(format!(
            "embedding has {} rows, graph has {} nodes",
            tokens.len(),
            graph.node_count()
        )));
    }
    let (d, w) = (embedding.dim, embedding.mode.width(embedding.dim));
    let mut means = vec![0.0; embedding.means.len()];
    let mut covariances = vec![0.0; embedding.covariances.len()];
    let mut seen = vec![false; tokens.len()];
    for (row, token) in tokens.iter().enumerate() {
        let u = graph
            .node_of(token)
            .ok_or_else(|| Error::Input(format!("embedding node {token:?} is not in the graph")))?;
        if std::mem::replace(&mut seen[u], true) {
            return Err(Error::Input(format!("embedding lists {token:?} twice")));
        }
        means[u * d..(u + 1) * d].copy_from_slice(embedding.mean(row));
        covariances[u * w..(u + 1) * w].copy_from_slice(embedding.cov(row));
    }
    Ok((graph, GaussianEmbedding { means, covariances, ..embedding }))
}

fn evaluate_cmd(cmd: EvaluateCmd) -> Result<()> {
    let (tokens, embedding) = GaussianEmbedding::read(open_input(&cmd.embedding)?)?;
    let graph = cmd.graph.as_deref().map(load_graph).transpose()?.map(|(g, _)| g);
    let has_graph = graph.is_some();
    let (graph, embedding) = align(tokens, embedding, graph)?;
    let labels = match &cmd.labels {
        Some(path) => Some(Clustering::from_labels(&load_labels(open_input(path)?, &graph)?)),
        None => None,
    };
    if cmd.groups.is_some() && !has_graph {
        return Err(Error::Config("goodness-of-fit needs --graph".into()).into());
    }
    let report = pool(cmd.threads)?
        .install(|| evaluate(&embedding, Some(&graph), labels.as_ref(), cmd.groups, cmd.restarts, cmd.seed))?;
    let out = EvaluateOutput { nmi: report.nmi, gof: report.gof, mean_cov_trace: report.mean_cov_trace };
    match &cmd.out {
        Some(path) => {
            write_json(path, &out)?;
        }
        None => println!("{}", serde_json::to_string_pretty(&out).expect("report serialises")),
    }
    Ok(())
}

fn synth(cmd: SynthCmd) -> Result<()> {
    let (graph, labels): (Graph, Vec<String>) = match cmd.kind {
        SynthKind::Toy => {
            let (g, roles) = generate_role_toy();
            (g, roles.iter().map(|r| r.name().to_owned()).collect())
        }
        SynthKind::Sbm | SynthKind::PlantedRole => {
            let spec = if cmd.kind == SynthKind::Sbm {
                SbmSpec {
                    p_in: cmd.p_in,
                    p_out: cmd.p_out,
                    ..SbmSpec::planted(cmd.blocks.0.clone(), cmd.noise, cmd.seed)
                }
            } else {
                planted_role_spec(cmd.noise, cmd.seed)
            };
            let (g, blocks) = generate_sbm(&spec)?;
            (g, blocks.iter().map(|b| format!("block{b}")).collect())
        }
    };
    std::fs::create_dir_all(&cmd.out_dir)?;
    write_atomic(&cmd.out_dir.join("graph.edgelist"), |buf| write_edge_list(&graph, buf))?;
    write_atomic(&cmd.out_dir.join("labels.tsv"), |buf| {
        for (u, label) in labels.iter().enumerate() {
            writeln!(buf, "{}\t{label}", graph.token(u))?;
        }
        Ok(())
    })?;
    eprintln!("{} nodes, {} edges", graph.node_count(), graph.edge_count());
    Ok(())
}

fn write_table(path: Option<&Path>, body: impl FnOnce(&mut Vec<u8>) -> rolegauss::Result<()>) -> Result<()> {
    match path {
        Some(path) => {
            write_atomic(path, body)?;
        }
        None => {
            let mut buf = Vec::new();
            body(&mut buf)?;
            std::io::stdout().write_all(&buf)?;
        }
    }
    Ok(())
}

/// Similarity does not depend on any swept parameter, so it is computed once
/// and every value reuses it.
fn sweep(cmd: SweepCmd) -> Result<()> {
    let (graph, _) = load_graph(&cmd.graph)?;
    let labels = Clustering::from_labels(&load_labels(open_input(&cmd.labels)?, &graph)?);
    let base = cmd.pipeline.config();
    let similarity = compute(&graph, base.measure, &base.similarity)?;
    let kmeans_pool = pool(base.similarity.threads)?;
    let mut rows = Vec::with_capacity(cmd.values.0.len());
    for &value in &cmd.values.0 {
        let mut config = base.clone();
        match cmd.param {
            SweepParam::Dim => config.train.dim = value,
            SweepParam::SamplesR => config.r = value,
            SweepParam::PositivesK => config.k = value,
        }
        let out = run_from_similarity(similarity.clone(), &config)?;
        let report = kmeans_pool.install(|| {
            evaluate(&out.embedding, Some(&graph), Some(&labels), None, config.kmeans_restarts, config.seed)
        })?;
        rows.push((value, report.nmi.expect("labels were given")));
    }
    write_table(cmd.out.as_deref(), |buf| {
        writeln!(buf, "{}\tnmi", cmd.param.name())?;
        for (value, nmi) in &rows {
            writeln!(buf, "{value}\t{nmi}")?;
        }
        Ok(())
    })
}

fn uncertainty(cmd: UncertaintyCmd) -> Result<()> {
    let config = cmd.pipeline.config();
    let base = SbmSpec { p_in: cmd.p_in, p_out: cmd.p_out, ..SbmSpec::planted(cmd.blocks.0.clone(), 0, config.seed) };
    let rows = uncertainty_sweep(&base, &cmd.noise_levels.0, &config)?;
    write_table(cmd.out.as_deref(), |buf| write_sweep_tsv(&rows, buf))
}

fn replay(cmd: ReplayCmd) -> Result<()> {
    let checks = embed::replay(&cmd.manifest, &cmd.out_dir, cmd.threads)?;
    for c in &checks {
        println!("{}\tok", c.name);
    }
    Ok(())
}
