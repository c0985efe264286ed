//! Per-message feature vectors.
//!
//! Nine social features come from the sender/receiver relationship graph,
//! nine textual scalars from the message text. The recipient's out-degree
//! centrality is the sensitive attribute and is kept out of the vector.

mod text;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, core_numbers, DirectedGraph, Direction};

pub use text::{
    extract_text_features, extract_text_features_with, tokenize, Lexicon, PosClass, PosTagger,
    RuleTagger, SmileyPatterns, TextFeatures, POS_CLASSES,
};

/// Model input dimensionality.
pub const FEATURE_DIM: usize = 18;

/// Column names of [`LabeledInstance::model_features`], in order.
pub const FEATURE_NAMES: [&str; FEATURE_DIM] = [
    "node_count",
    "edge_count",
    "deg_in_sender",
    "deg_out_sender",
    "deg_in_receiver",
    "edge_betweenness_sr",
    "tie_strength",
    "kcore_sender",
    "kcore_receiver",
    "bad_word_density",
    "uppercase_density",
    "exclaim_question_count",
    "smiley_count",
    "pos_noun",
    "pos_verb",
    "pos_adjective",
    "pos_pronoun",
    "pos_interjection",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SocialFeatures {
    pub node_count: usize,
    pub edge_count: usize,
    pub deg_in_sender: f64,
    pub deg_out_sender: f64,
    pub deg_in_receiver: f64,
    pub deg_out_receiver: f64,
    pub edge_betweenness_sr: f64,
    pub tie_strength: f64,
    pub kcore_sender: u32,
    pub kcore_receiver: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledInstance {
    pub message_id: String,
    pub model_features: Vec<f64>,
    pub label: bool,
    /// Recipient out-degree centrality, before median thresholding.
    pub sensitive_value: f64,
}

pub fn extract_social_features(
    graph: &DirectedGraph,
    sender: &str,
    receiver: &str,
) -> Result<SocialFeatures> {
    let rel = graph::relationship_graph(graph, sender, receiver)?;
    let g = &rel.subgraph;
    let cores = core_numbers(g);
    let s = g.require(sender)?;
    let r = g.require(receiver)?;
    let edge_betweenness_sr = match graph::edge_betweenness(g, sender, receiver) {
        Ok(b) => b,
        Err(Error::MissingEdge { .. }) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(SocialFeatures {
        node_count: g.node_count(),
        edge_count: g.edge_count(),
        deg_in_sender: graph::degree_centrality(g, sender, Direction::In)?,
        deg_out_sender: graph::degree_centrality(g, sender, Direction::Out)?,
        deg_in_receiver: graph::degree_centrality(g, receiver, Direction::In)?,
        deg_out_receiver: graph::degree_centrality(g, receiver, Direction::Out)?,
        edge_betweenness_sr,
        tie_strength: graph::tie_strength(g, sender, receiver)?,
        kcore_sender: cores[s],
        kcore_receiver: cores[r],
    })
}

pub fn assemble_instance(
    social: &SocialFeatures,
    text: &TextFeatures,
    label: bool,
    message_id: impl Into<String>,
) -> LabeledInstance {
    let mut v = Vec::with_capacity(FEATURE_DIM);
    v.extend([
        social.node_count as f64,
        social.edge_count as f64,
        social.deg_in_sender,
        social.deg_out_sender,
        social.deg_in_receiver,
        social.edge_betweenness_sr,
        social.tie_strength,
        f64::from(social.kcore_sender),
        f64::from(social.kcore_receiver),
        text.bad_word_density,
        text.uppercase_density,
        f64::from(text.exclaim_question_count),
        f64::from(text.smiley_count),
    ]);
    v.extend(text.pos_counts.iter().map(|&c| f64::from(c)));
    debug_assert_eq!(v.len(), FEATURE_DIM);
    LabeledInstance {
        message_id: message_id.into(),
        model_features: v,
        label,
        sensitive_value: social.deg_out_receiver,
    }
}
