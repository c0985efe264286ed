//! Brute-force oracles and random inputs shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use netfair::fairness::{GroupRates, GroupStats};
use rand::Rng;

/// Random simple directed graph on `n` nodes named `v0..`, as an edge list
/// (no self-loops, no duplicates). Isolated nodes are dropped by the graph
/// builder, so the returned node list is the set actually present.
pub fn random_digraph<R: Rng>(
    rng: &mut R,
    max_nodes: usize,
) -> (Vec<String>, Vec<(String, String)>) {
    let n = rng.gen_range(2..=max_nodes);
    let p: f64 = rng.gen_range(0.1..0.6);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(p) {
                edges.push((format!("v{a}"), format!("v{b}")));
            }
        }
    }
    if edges.is_empty() {
        edges.push(("v0".into(), "v1".into()));
    }
    let nodes: BTreeSet<String> = edges
        .iter()
        .flat_map(|(a, b)| [a.clone(), b.clone()])
        .collect();
    (nodes.into_iter().collect(), edges)
}

pub fn index_of(nodes: &[String], name: &str) -> usize {
    nodes.iter().position(|n| n == name).unwrap()
}

pub fn adjacency(nodes: &[String], edges: &[(String, String)]) -> Vec<Vec<bool>> {
    let n = nodes.len();
    let mut adj = vec![vec![false; n]; n];
    for (a, b) in edges {
        adj[index_of(nodes, a)][index_of(nodes, b)] = true;
    }
    adj
}

pub fn brute_degree(adj: &[Vec<bool>], v: usize, out: bool) -> f64 {
    let n = adj.len();
    if n <= 1 {
        return 0.0;
    }
    let d = (0..n)
        .filter(|&u| if out { adj[v][u] } else { adj[u][v] })
        .count();
    d as f64 / (n - 1) as f64
}

fn bfs_dist(adj: &[Vec<bool>], s: usize) -> Vec<Option<usize>> {
    let n = adj.len();
    let mut dist = vec![None; n];
    dist[s] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for v in 0..n {
            if adj[u][v] && dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                q.push_back(v);
            }
        }
    }
    dist
}

/// Enumerates every shortest path explicitly.
pub fn brute_edge_betweenness(adj: &[Vec<bool>], a: usize, b: usize) -> f64 {
    let n = adj.len();
    if n < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for s in 0..n {
        let dist = bfs_dist(adj, s);
        for t in 0..n {
            if s == t {
                continue;
            }
            let Some(d) = dist[t] else { continue };
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(path) = stack.pop() {
                let last = *path.last().unwrap();
                if path.len() - 1 == d {
                    if last == t {
                        paths.push(path);
                    }
                    continue;
                }
                for v in 0..n {
                    if adj[last][v] && dist[v] == Some(path.len()) {
                        let mut next = path.clone();
                        next.push(v);
                        stack.push(next);
                    }
                }
            }
            let through = paths
                .iter()
                .filter(|p| p.windows(2).any(|w| w[0] == a && w[1] == b))
                .count();
            total += through as f64 / paths.len() as f64;
        }
    }
    total / (n * (n - 1)) as f64
}

pub fn undirected(adj: &[Vec<bool>]) -> Vec<BTreeSet<usize>> {
    let n = adj.len();
    (0..n)
        .map(|u| {
            (0..n)
                .filter(|&v| v != u && (adj[u][v] || adj[v][u]))
                .collect()
        })
        .collect()
}

/// Core number by repeated peeling at every k.
pub fn brute_core_numbers(adj: &[Vec<bool>]) -> Vec<u32> {
    let nb = undirected(adj);
    let n = adj.len();
    let mut core = vec![0u32; n];
    for k in 1..=n as u32 {
        let mut alive = vec![true; n];
        loop {
            let drop: Vec<usize> = (0..n)
                .filter(|&u| alive[u] && (nb[u].iter().filter(|&&v| alive[v]).count() as u32) < k)
                .collect();
            if drop.is_empty() {
                break;
            }
            for u in drop {
                alive[u] = false;
            }
        }
        for u in 0..n {
            if alive[u] {
                core[u] = k;
            }
        }
    }
    core
}

pub fn brute_tie_strength(adj: &[Vec<bool>], a: usize, b: usize) -> f64 {
    let nb = undirected(adj);
    nb[a].intersection(&nb[b]).count() as f64
}

/// Probability a random positive outranks a random negative, ties half.
pub fn brute_auc(labels: &[bool], scores: &[f64]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &li) in labels.iter().enumerate() {
        for (j, &lj) in labels.iter().enumerate() {
            if li && !lj {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

pub fn random_group_rates<R: Rng>(rng: &mut R) -> GroupRates {
    let mass_low = rng.gen_range(0.05..0.95);
    let mut group = |mass: f64| {
        GroupStats::from_rates(
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.01..0.99),
            mass,
        )
    };
    let low = group(mass_low);
    let high = group(1.0 - mass_low);
    GroupRates { low, high }
}

/// Whether `(x, y)` is reachable by a group with rates `(fpr, tpr)`: solves
/// for the mixing pair directly and checks it is a probability pair.
fn reachable(fpr: f64, tpr: f64, x: f64, y: f64) -> bool {
    const TOL: f64 = 1e-9;
    let det = tpr - fpr;
    if det.abs() < 1e-12 {
        return (x - y).abs() < TOL;
    }
    let p0 = (x * tpr - y * fpr) / det;
    let p1 = (y * (1.0 - fpr) - x * (1.0 - tpr)) / det;
    (-TOL..=1.0 + TOL).contains(&p0) && (-TOL..=1.0 + TOL).contains(&p1)
}

/// Minimum expected loss over common targets on a `steps × steps` grid.
pub fn grid_min_loss(rates: &GroupRates, steps: usize) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..steps {
        for j in 0..steps {
            let x = i as f64 / (steps - 1) as f64;
            let y = j as f64 / (steps - 1) as f64;
            if !reachable(rates.low.fpr, rates.low.tpr, x, y)
                || !reachable(rates.high.fpr, rates.high.tpr, x, y)
            {
                continue;
            }
            let loss: f64 = [&rates.low, &rates.high]
                .iter()
                .map(|g| g.mass * (g.base_rate * (1.0 - y) + (1.0 - g.base_rate) * x))
                .sum();
            best = best.min(loss);
        }
    }
    best
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn instance(
    id: usize,
    features: Vec<f64>,
    label: bool,
    sensitive: f64,
) -> netfair::features::LabeledInstance {
    netfair::features::LabeledInstance {
        message_id: format!("x{id}"),
        model_features: features,
        label,
        sensitive_value: sensitive,
    }
}

/// Box–Muller standard normal.
pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
