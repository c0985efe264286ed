//! Synthetic corpora shaped like a small labeled social-media sample.
//!
//! Users form a directed preferential-attachment graph and messages travel
//! along its edges. Bullying labels are drawn with probability
//! `c · exp(-bias_strength · rank)`, where `rank ∈ [0, 1]` is the
//! recipient's out-degree percentile, so peripheral recipients are targeted
//! more often. Text style also depends on the recipient's position: some
//! bullying aimed at peripheral users is phrased like ordinary chat, and some
//! friendly messages to central users contain profanity.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::MessageRecord;
use crate::error::{Error, Result};
use crate::graph::{degree_centrality, relationship_graph, DirectedGraph, Direction};

const SEED_CLIQUE: usize = 3;
const LINKS_PER_NODE: usize = 3;
const LABEL_RETRIES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub node_count: usize,
    pub message_count: usize,
    /// Target fraction of bullying messages, in (0, 0.5).
    pub positive_rate: f64,
    /// How strongly low-centrality recipients attract bullying labels (≥ 0).
    pub bias_strength: f64,
    /// Fraction of bullying messages to below-median recipients written
    /// without overt markers.
    pub covert_rate: f64,
    /// Fraction of non-bullying messages containing profanity, for the most
    /// central recipient; scales linearly to 0 for the least central.
    pub banter_rate: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            node_count: 500,
            message_count: 5_000,
            positive_rate: 0.02,
            bias_strength: 0.3,
            covert_rate: 0.1,
            banter_rate: 0.02,
            seed: 7,
        }
    }
}

impl SyntheticConfig {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.node_count < SEED_CLIQUE + 1 {
            return bad(format!("node_count must be > {SEED_CLIQUE}"));
        }
        if self.message_count == 0 {
            return bad("message_count must be positive".into());
        }
        if !(self.positive_rate > 0.0 && self.positive_rate < 0.5) {
            return bad(format!(
                "positive_rate must lie in (0, 0.5), got {}",
                self.positive_rate
            ));
        }
        if !(self.bias_strength >= 0.0 && self.bias_strength.is_finite()) {
            return bad("bias_strength must be finite and ≥ 0".into());
        }
        for (name, v) in [
            ("covert_rate", self.covert_rate),
            ("banter_rate", self.banter_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        Ok(())
    }
}

const NEUTRAL: &[&str] = &[
    "hey are you coming to the game tonight",
    "thanks for the notes from class",
    "did you see the new episode yet",
    "see you at practice tomorrow",
    "happy birthday hope you have a great day",
    "can you send me the homework please",
    "that song is awesome",
    "where are we meeting later?",
    "good luck on the test tomorrow",
    "omg that video haha",
    "nice pic :)",
    "lol that was so funny :)",
    "are you ok? you seemed quiet today",
    "I will bring snacks for the trip",
    "what time does the movie start?",
    "my mom says hi",
    "we should play again this weekend",
    "congrats on the team!",
    "just finished the book you lent me",
    "running late, save me a seat",
];

const OVERT: &[&str] = &[
    "you are such a {}",
    "shut up you {} {}",
    "everyone thinks you are a {}",
    "go away {}",
    "nobody likes you {}",
    "why are you so {} and {}",
    "look at this {} lol",
    "you {} just leave",
];

const BANTER: &[&str] = &[
    "lol you are such a {} :)",
    "haha shut up {} see you later",
    "you {} lol :D",
    "omg you {} that was hilarious :)",
];

const INSULTS: &[&str] = &[
    "stupid",
    "idiot",
    "loser",
    "ugly",
    "fat",
    "dumb",
    "freak",
    "moron",
    "pathetic",
    "worthless",
    "trash",
    "creep",
    "weirdo",
];

fn fill(template: &str, rng: &mut ChaCha8Rng) -> String {
    let mut out = String::with_capacity(template.len() + 16);
    let mut parts = template.split("{}");
    if let Some(first) = parts.next() {
        out.push_str(first);
    }
    for part in parts {
        out.push_str(INSULTS.choose(rng).expect("non-empty"));
        out.push_str(part);
    }
    out
}

fn overt_message(rng: &mut ChaCha8Rng) -> String {
    let mut text = fill(OVERT.choose(rng).expect("non-empty"), rng);
    if rng.gen_bool(0.4) {
        text = text.to_uppercase();
    }
    if rng.gen_bool(0.5) {
        text.push_str(&"!".repeat(rng.gen_range(1..=3)));
    }
    text
}

/// Directed preferential-attachment edges over `node_count` users.
fn attachment_edges(node_count: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = BTreeSet::new();
    // Each node appears once per incident edge plus once on arrival.
    let mut urn: Vec<usize> = Vec::new();
    for a in 0..SEED_CLIQUE {
        urn.push(a);
        for b in 0..SEED_CLIQUE {
            if a != b {
                edges.insert((a, b));
                urn.push(a);
            }
        }
    }
    for v in SEED_CLIQUE..node_count {
        let mut targets = BTreeSet::new();
        while targets.len() < LINKS_PER_NODE.min(v) {
            targets.insert(urn[rng.gen_range(0..urn.len())]);
        }
        urn.push(v);
        for t in targets {
            let edge = if rng.gen_bool(0.5) { (v, t) } else { (t, v) };
            edges.insert(edge);
            urn.push(v);
            urn.push(t);
        }
    }
    edges.into_iter().collect()
}

/// Mid-rank percentile of each value in `[0, 1]`.
fn percentile_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n <= 1 {
        return vec![0.5; n];
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut lo = 0;
    while lo < n {
        let mut hi = lo + 1;
        while hi < n && values[order[hi]] == values[order[lo]] {
            hi += 1;
        }
        let mid = (lo + hi - 1) as f64 / 2.0 / (n - 1) as f64;
        for &i in &order[lo..hi] {
            ranks[i] = mid;
        }
        lo = hi;
    }
    ranks
}

/// Out-degree centrality of each message's recipient inside the message's
/// relationship graph, over the graph formed by all message edges. This is
/// the sensitive value the audit groups on.
pub fn recipient_centrality(records: &[MessageRecord]) -> Result<Vec<f64>> {
    let pairs: Vec<(&str, &str)> = records
        .iter()
        .map(|r| (r.sender.as_str(), r.recipient.as_str()))
        .collect();
    pair_centrality(&pairs)
}

fn pair_centrality(pairs: &[(&str, &str)]) -> Result<Vec<f64>> {
    let graph = DirectedGraph::from_edges(pairs.iter().copied());
    pairs
        .par_iter()
        .map(|&(s, r)| {
            let rel = relationship_graph(&graph, s, r)?;
            degree_centrality(&rel.subgraph, r, Direction::Out)
        })
        .collect()
}

pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<Vec<MessageRecord>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let edges = attachment_edges(cfg.node_count, &mut rng);

    // Every edge carries at least one message while the budget allows.
    let mut carried: Vec<(usize, usize)> = edges.clone();
    carried.shuffle(&mut rng);
    if cfg.message_count <= carried.len() {
        carried.truncate(cfg.message_count);
    } else {
        for _ in carried.len()..cfg.message_count {
            carried.push(edges[rng.gen_range(0..edges.len())]);
        }
        carried.shuffle(&mut rng);
    }

    let width = (cfg.node_count - 1).to_string().len();
    let names: Vec<String> = (0..cfg.node_count)
        .map(|i| format!("u{i:0width$}"))
        .collect();
    let pairs: Vec<(&str, &str)> = carried
        .iter()
        .map(|&(s, r)| (names[s].as_str(), names[r].as_str()))
        .collect();
    let ranks = percentile_ranks(&pair_centrality(&pairs)?);

    let weights: Vec<f64> = ranks
        .iter()
        .map(|r| (-cfg.bias_strength * r).exp())
        .collect();
    let scale = cfg.positive_rate * weights.len() as f64 / weights.iter().sum::<f64>();
    let peak = scale * weights.iter().cloned().fold(0.0, f64::max);
    if peak > 1.0 {
        return Err(Error::Calibration(format!(
            "bias_strength {} needs a label probability of {peak:.3} > 1 to reach positive_rate {}",
            cfg.bias_strength, cfg.positive_rate
        )));
    }
    let target = cfg.positive_rate * cfg.message_count as f64;
    let (lo, hi) = (0.8 * target, 1.2 * target);
    let mut labels = Vec::new();
    for attempt in 0..=LABEL_RETRIES {
        if attempt == LABEL_RETRIES {
            return Err(Error::Calibration(format!(
                "realized positive count stayed outside [{lo:.0}, {hi:.0}]"
            )));
        }
        labels = weights.iter().map(|w| rng.gen_bool(scale * w)).collect();
        let count = labels.iter().filter(|&&y| y).count() as f64;
        if (lo..=hi).contains(&count) {
            break;
        }
    }

    let records = pairs
        .iter()
        .zip(&labels)
        .zip(&ranks)
        .enumerate()
        .map(|(i, ((&(s, r), &label), &rank))| {
            let text = if label {
                if rank < 0.5 && rng.gen_bool(cfg.covert_rate) {
                    NEUTRAL.choose(&mut rng).expect("non-empty").to_string()
                } else {
                    overt_message(&mut rng)
                }
            } else if rng.gen_bool(cfg.banter_rate * rank) {
                fill(BANTER.choose(&mut rng).expect("non-empty"), &mut rng)
            } else {
                NEUTRAL.choose(&mut rng).expect("non-empty").to_string()
            };
            MessageRecord {
                message_id: format!("m{i:05}"),
                sender: s.to_owned(),
                recipient: r.to_owned(),
                text,
                label,
            }
        })
        .collect();
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_ranks_use_mid_ranks() {
        assert_eq!(
            percentile_ranks(&[5.0, 1.0, 5.0, 3.0]),
            [(2.0 + 3.0) / 2.0 / 3.0, 0.0, 2.5 / 3.0, 1.0 / 3.0]
        );
    }

    #[test]
    fn small_corpus_is_well_formed() {
        let cfg = SyntheticConfig {
            node_count: 60,
            message_count: 600,
            positive_rate: 0.1,
            seed: 3,
            ..SyntheticConfig::default()
        };
        let recs = generate_synthetic(&cfg).unwrap();
        assert_eq!(recs.len(), 600);
        assert!(recs.iter().all(|r| r.sender != r.recipient));
        assert!(recs.iter().all(|r| !r.text.contains('\t')));
        assert_eq!(recs, generate_synthetic(&cfg).unwrap());
    }

    #[test]
    fn extreme_bias_is_infeasible() {
        let cfg = SyntheticConfig {
            bias_strength: 200.0,
            positive_rate: 0.3,
            ..SyntheticConfig::default()
        };
        assert!(matches!(
            generate_synthetic(&cfg),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn invalid_configs() {
        for cfg in [
            SyntheticConfig {
                positive_rate: 0.5,
                ..Default::default()
            },
            SyntheticConfig {
                positive_rate: 0.0,
                ..Default::default()
            },
            SyntheticConfig {
                bias_strength: -1.0,
                ..Default::default()
            },
            SyntheticConfig {
                node_count: 2,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                generate_synthetic(&cfg),
                Err(Error::InvalidParameter(_))
            ));
        }
    }
}
