//! Undirected simple graphs over dense node ids.

mod generate;
mod io;

pub use generate::{generate_role_toy, generate_sbm, planted_role_spec, Role, SbmSpec};
pub use io::{load_edge_list, load_labels, write_edge_list};

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Undirected, unweighted simple graph with node ids `0..node_count`.
///
/// Adjacency lists are sorted and free of self-loops and duplicates. The
/// graph is immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
    index: HashMap<String, usize>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an edge iterator. Self-loops and repeated edges
    /// (in either orientation) are dropped.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); node_count];
        for (u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::Input(format!("edge ({u}, {v}) out of range for {node_count} nodes")));
            }
            if u == v {
                continue;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut edge_count = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Ok(Graph { adjacency, labels: None, index: HashMap::new(), edge_count: edge_count / 2 })
    }

    /// Attaches external string ids, one distinct id per node.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.node_count() {
            return Err(Error::Input(format!("{} labels for {} nodes", labels.len(), self.node_count())));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (u, token) in labels.iter().enumerate() {
            if index.insert(token.clone(), u).is_some() {
                return Err(Error::Input(format!("node token {token:?} appears twice")));
            }
        }
        self.labels = Some(labels);
        self.index = index;
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// External token for `u`, or its decimal id when the graph is unlabeled.
    pub fn token(&self, u: usize) -> String {
        match &self.labels {
            Some(labels) => labels[u].clone(),
            None => u.to_string(),
        }
    }

    /// Maps an external token back to its node id.
    pub fn node_of(&self, token: &str) -> Option<usize> {
        match &self.labels {
            Some(_) => self.index.get(token).copied(),
            None => token.parse().ok().filter(|&u| u < self.node_count()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drops_loops_and_duplicates() {
        let g = Graph::from_edges(3, [(0, 1), (1, 0), (1, 1), (1, 2), (0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert!(g.has_edge(2, 1));
        assert!(!g.has_edge(0, 2));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn out_of_range_edge_is_rejected() {
        assert!(matches!(Graph::from_edges(2, [(0, 2)]), Err(Error::Input(_))));
    }

    #[test]
    fn degree_sum_is_twice_edge_count() {
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (3, 4), (2, 3)]).unwrap();
        let total: usize = (0..5).map(|u| g.degree(u)).sum();
        assert_eq!(total, 2 * g.edge_count());
    }

    #[test]
    fn token_lookup() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap().with_labels(vec!["x".into(), "y".into()]).unwrap();
        assert_eq!(g.token(1), "y");
        assert_eq!(g.node_of("x"), Some(0));
        assert_eq!(g.node_of("z"), None);
    }
}
