use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::DirectedGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EgoOrder {
    /// The ego, its in- and out-neighbors, and only ego-incident edges.
    One,
    /// Same nodes as [`EgoOrder::One`] plus every edge among the neighbors.
    OnePointFive,
}

#[derive(Debug, Clone)]
pub struct EgoNetwork {
    pub ego: String,
    pub order: EgoOrder,
    pub subgraph: DirectedGraph,
}

/// Union of the sender's and receiver's 1.5-ego networks.
#[derive(Debug, Clone)]
pub struct RelationshipGraph {
    pub sender: String,
    pub receiver: String,
    pub subgraph: DirectedGraph,
}

/// Nodes and edges of an ego network, in the parent graph's indices.
fn ego_parts(
    graph: &DirectedGraph,
    ego: usize,
    order: EgoOrder,
) -> (Vec<usize>, Vec<(usize, usize)>) {
    let mut neighbors: BTreeSet<usize> = graph.out_neighbors(ego).iter().copied().collect();
    neighbors.extend(graph.in_neighbors(ego).iter().copied());

    let mut nodes = Vec::with_capacity(neighbors.len() + 1);
    nodes.push(ego);
    nodes.extend(neighbors.iter().copied());

    let edges = match order {
        EgoOrder::One => {
            let mut edges: Vec<(usize, usize)> =
                graph.out_neighbors(ego).iter().map(|&w| (ego, w)).collect();
            edges.extend(graph.in_neighbors(ego).iter().map(|&v| (v, ego)));
            edges
        }
        EgoOrder::OnePointFive => {
            let members: HashSet<usize> = nodes.iter().copied().collect();
            let mut edges = Vec::new();
            for &v in &nodes {
                for &w in graph.out_neighbors(v) {
                    if members.contains(&w) {
                        edges.push((v, w));
                    }
                }
            }
            edges
        }
    };
    (nodes, edges)
}

pub fn ego_network(graph: &DirectedGraph, ego: &str, order: EgoOrder) -> Result<EgoNetwork> {
    let e = graph.require(ego)?;
    let (nodes, edges) = ego_parts(graph, e, order);
    Ok(EgoNetwork {
        ego: ego.to_owned(),
        order,
        subgraph: graph.subgraph(&nodes, edges),
    })
}

pub fn relationship_graph(
    graph: &DirectedGraph,
    sender: &str,
    receiver: &str,
) -> Result<RelationshipGraph> {
    if sender == receiver {
        return Err(Error::SelfMessage(sender.to_owned()));
    }
    let s = graph.require(sender)?;
    let r = graph.require(receiver)?;
    let (sender_nodes, sender_edges) = ego_parts(graph, s, EgoOrder::OnePointFive);
    let (receiver_nodes, receiver_edges) = ego_parts(graph, r, EgoOrder::OnePointFive);

    let nodes: BTreeSet<usize> = sender_nodes.into_iter().chain(receiver_nodes).collect();
    let edges: BTreeSet<(usize, usize)> = sender_edges.into_iter().chain(receiver_edges).collect();
    let nodes: Vec<usize> = nodes.into_iter().collect();
    Ok(RelationshipGraph {
        sender: sender.to_owned(),
        receiver: receiver.to_owned(),
        subgraph: graph.subgraph(&nodes, edges),
    })
}
