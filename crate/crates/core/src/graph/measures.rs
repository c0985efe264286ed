//! Network measures over a (relationship) graph.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::DirectedGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    In,
    Out,
}

/// Directed degree divided by `n - 1`; zero for a single-node graph.
pub fn degree_centrality(graph: &DirectedGraph, node: &str, direction: Direction) -> Result<f64> {
    let v = graph.require(node)?;
    let n = graph.node_count();
    if n <= 1 {
        return Ok(0.0);
    }
    let degree = match direction {
        Direction::In => graph.in_neighbors(v).len(),
        Direction::Out => graph.out_neighbors(v).len(),
    };
    Ok(degree as f64 / (n - 1) as f64)
}

/// Betweenness of the edge `from → to`: for every ordered pair `(s, t)`, the
/// fraction of shortest directed hop-count paths from `s` to `t` that use
/// the edge, summed and divided by `n (n - 1)`.
pub fn edge_betweenness(graph: &DirectedGraph, from: &str, to: &str) -> Result<f64> {
    let a = graph.require(from)?;
    let b = graph.require(to)?;
    if !graph.has_edge(a, b) {
        return Err(Error::MissingEdge {
            from: from.to_owned(),
            to: to.to_owned(),
        });
    }
    let n = graph.node_count();

    let mut dist = vec![usize::MAX; n];
    let mut sigma = vec![0f64; n];
    let mut delta = vec![0f64; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);
    let mut total = 0.0;

    // Brandes accumulation, keeping only the credit that flows over a→b.
    for source in 0..n {
        dist.fill(usize::MAX);
        sigma.fill(0.0);
        delta.fill(0.0);
        order.clear();

        dist[source] = 0;
        sigma[source] = 1.0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in graph.out_neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                }
            }
        }
        if dist[a] == usize::MAX || dist[b] != dist[a] + 1 {
            continue;
        }
        for &w in order.iter().rev() {
            for &v in graph.in_neighbors(w) {
                if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                    let credit = sigma[v] / sigma[w] * (1.0 + delta[w]);
                    if v == a && w == b {
                        total += credit;
                    }
                    delta[v] += credit;
                }
            }
        }
    }
    Ok(total / (n * (n - 1)) as f64)
}

/// Core number of every node in the undirected view (Batagelj–Zaversnik
/// bucket peeling).
pub fn core_numbers(graph: &DirectedGraph) -> Vec<u32> {
    let n = graph.node_count();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| graph.undirected_neighbors(v)).collect();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);

    // bin[d] = start offset of degree-d nodes within `vert`.
    let mut bin = vec![0usize; max_degree + 1];
    for &d in &degree {
        bin[d] += 1;
    }
    let mut start = 0;
    for slot in bin.iter_mut() {
        let count = *slot;
        *slot = start;
        start += count;
    }
    let mut vert = vec![0usize; n];
    let mut pos = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[degree[v]];
        vert[pos[v]] = v;
        bin[degree[v]] += 1;
    }
    for d in (1..=max_degree).rev() {
        bin[d] = bin[d - 1];
    }
    if !bin.is_empty() {
        bin[0] = 0;
    }

    for i in 0..n {
        let v = vert[i];
        for &u in &adj[v] {
            if degree[u] > degree[v] {
                let du = degree[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    vert.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                degree[u] -= 1;
            }
        }
    }
    degree.into_iter().map(|d| d as u32).collect()
}

pub fn k_core_score(graph: &DirectedGraph, node: &str) -> Result<u32> {
    let v = graph.require(node)?;
    Ok(core_numbers(graph)[v])
}

/// Common neighbors of the two nodes in the undirected view.
pub fn tie_strength(graph: &DirectedGraph, sender: &str, receiver: &str) -> Result<f64> {
    let s = graph.require(sender)?;
    let r = graph.require(receiver)?;
    let (ns, nr) = (graph.undirected_neighbors(s), graph.undirected_neighbors(r));
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < ns.len() && j < nr.len() {
        match ns[i].cmp(&nr[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    Ok(common as f64)
}
