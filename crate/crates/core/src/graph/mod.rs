//! Directed interaction graphs, ego networks and relationship graphs.
//!
//! Node identifiers are user handles; internally every graph maps them to
//! dense indices `0..n` in first-appearance order. Subgraphs (ego networks,
//! relationship graphs) are standalone [`DirectedGraph`]s with their own
//! dense indexing.

mod ego;
mod measures;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub use ego::{ego_network, relationship_graph, EgoNetwork, EgoOrder, RelationshipGraph};
pub use measures::{
    core_numbers, degree_centrality, edge_betweenness, k_core_score, tie_strength, Direction,
};

/// A directed graph without self-loops or parallel edges.
///
/// Repeated edges are collapsed into one edge whose weight counts the
/// repetitions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DirectedGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    weights: BTreeMap<(usize, usize), u64>,
    self_loops_dropped: usize,
}

impl DirectedGraph {
    /// Builds a graph from an ordered edge list.
    pub fn from_edges<I, S>(edges: I) -> Self
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut g = DirectedGraph::default();
        for (from, to) in edges {
            let (from, to) = (from.as_ref(), to.as_ref());
            let a = g.intern(from);
            if from == to {
                g.self_loops_dropped += 1;
                continue;
            }
            let b = g.intern(to);
            *g.weights.entry((a, b)).or_insert(0) += 1;
        }
        g.rebuild_adjacency();
        g
    }

    /// Builds a subgraph over `nodes` (indices into `self`, in the order given)
    /// keeping only the listed edges. Weights are carried over.
    pub(crate) fn subgraph<I>(&self, nodes: &[usize], edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut local = vec![usize::MAX; self.names.len()];
        let mut g = DirectedGraph::default();
        for &v in nodes {
            local[v] = g.intern(&self.names[v]);
        }
        for (a, b) in edges {
            debug_assert!(local[a] != usize::MAX && local[b] != usize::MAX);
            let w = self.weights.get(&(a, b)).copied().unwrap_or(1);
            g.weights.insert((local[a], local[b]), w);
        }
        g.rebuild_adjacency();
        g
    }

    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), i);
        i
    }

    fn rebuild_adjacency(&mut self) {
        let n = self.names.len();
        self.out_adj = vec![Vec::new(); n];
        self.in_adj = vec![Vec::new(); n];
        // BTreeMap order keeps both adjacency lists sorted.
        for &(a, b) in self.weights.keys() {
            self.out_adj[a].push(b);
            self.in_adj[b].push(a);
        }
        for list in &mut self.in_adj {
            list.sort_unstable();
        }
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Number of self-loops dropped while building.
    pub fn self_loops_dropped(&self) -> usize {
        self.self_loops_dropped
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub(crate) fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownNode(name.to_owned()))
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn out_neighbors(&self, index: usize) -> &[usize] {
        &self.out_adj[index]
    }

    pub fn in_neighbors(&self, index: usize) -> &[usize] {
        &self.in_adj[index]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.weights.contains_key(&(from, to))
    }

    /// Message count carried by the edge `from → to`, if present.
    pub fn weight(&self, from: &str, to: &str) -> Option<u64> {
        let (a, b) = (self.index_of(from)?, self.index_of(to)?);
        self.weights.get(&(a, b)).copied()
    }

    /// Edges as index pairs in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.weights.keys().copied()
    }

    /// Sorted, deduplicated neighbors ignoring edge direction.
    pub fn undirected_neighbors(&self, index: usize) -> Vec<usize> {
        let (out, inc) = (&self.out_adj[index], &self.in_adj[index]);
        let mut merged = Vec::with_capacity(out.len() + inc.len());
        let (mut i, mut j) = (0, 0);
        while i < out.len() || j < inc.len() {
            let next = match (out.get(i), inc.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    i += 1;
                    j += 1;
                    a
                }
                (Some(&a), Some(&b)) if a < b => {
                    i += 1;
                    a
                }
                (Some(_), Some(&b)) => {
                    j += 1;
                    b
                }
                (Some(&a), None) => {
                    i += 1;
                    a
                }
                (None, Some(&b)) => {
                    j += 1;
                    b
                }
                (None, None) => unreachable!(),
            };
            merged.push(next);
        }
        merged
    }
}

/// Reads an edge list: one `sender_id,receiver_id` pair per line, no header.
/// Blank lines are skipped.
pub fn load_edge_list(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text)
}

pub fn parse_edge_list(text: &str) -> Result<Vec<(String, String)>> {
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse {
                line: i + 1,
                message: "expected 'sender_id,receiver_id'".into(),
            });
        };
        let (a, b) = (a.trim(), b.trim());
        if a.is_empty() || b.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                message: "empty node id".into(),
            });
        }
        edges.push((a.to_owned(), b.to_owned()));
    }
    Ok(edges)
}
