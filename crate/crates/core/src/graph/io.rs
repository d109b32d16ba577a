use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::Graph;
use crate::error::{Error, Result};

/// Reads a whitespace-separated edge list.
///
/// Tokens get dense ids in order of first appearance and are kept as the
/// graph's labels. Lines starting with `#` and blank lines are skipped.
/// Self-loops and repeated edges are dropped; any line with other than two
/// tokens is an error.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut edges = Vec::new();

    let mut intern = |tok: &str| -> usize {
        if let Some(&id) = ids.get(tok) {
            return id;
        }
        let id = tokens.len();
        ids.insert(tok.to_owned(), id);
        tokens.push(tok.to_owned());
        id
    };

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = trimmed.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::parse(idx + 1, format!("expected 2 tokens, found {}", parts.len())));
        }
        let u = intern(parts[0]);
        let v = intern(parts[1]);
        edges.push((u, v));
    }

    Graph::from_edges(tokens.len(), edges)?.with_labels(tokens)
}

/// Writes `graph` as an edge list using its external tokens.
///
/// Lines are ordered so that reloading assigns the same dense ids. A node
/// that cannot be introduced in id order through one of its edges
/// (including an isolated node) is introduced by a `tok tok` self-loop line,
/// which the loader registers and then drops.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    let n = graph.node_count();
    let mut seen = vec![false; n];
    let mut written = std::collections::HashSet::new();
    let mut order: Vec<(usize, usize)> = Vec::with_capacity(graph.edge_count());

    for w in 0..n {
        if seen[w] {
            continue;
        }
        let (a, b) = graph
            .neighbors(w)
            .iter()
            .find(|&&x| seen[x])
            .map(|&x| (x, w))
            .or_else(|| graph.has_edge(w, w + 1).then_some((w, w + 1)))
            .unwrap_or((w, w));
        seen[a] = true;
        seen[b] = true;
        if a != b {
            written.insert((a.min(b), a.max(b)));
        }
        order.push((a, b));
    }
    for (u, v) in graph.edges() {
        if !written.contains(&(u, v)) {
            order.push((u, v));
        }
    }
    for (u, v) in order {
        writeln!(out, "{} {}", graph.token(u), graph.token(v))?;
    }
    Ok(())
}

/// Reads a `token<TAB>label` file and returns one label per node of `graph`.
///
/// Every node must be labeled exactly once; unknown tokens are an error.
pub fn load_labels<R: BufRead>(reader: R, graph: &Graph) -> Result<Vec<String>> {
    let mut labels: Vec<Option<String>> = vec![None; graph.node_count()];
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = trimmed.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::parse(idx + 1, "expected token<TAB>label"));
        }
        let node = graph
            .node_of(parts[0])
            .ok_or_else(|| Error::parse(idx + 1, format!("unknown node token {:?}", parts[0])))?;
        if labels[node].replace(parts[1].to_owned()).is_some() {
            return Err(Error::parse(idx + 1, format!("duplicate label for {:?}", parts[0])));
        }
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(u, l)| l.ok_or_else(|| Error::Input(format!("node {:?} has no label", graph.token(u)))))
        .collect()
}
