//! The repeated-split audit: baseline classifier, group-conditional metrics,
//! equalized-odds post-processing, and aggregation across trials.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::{load_messages, MessageRecord};
use super::synthetic::{generate_synthetic, SyntheticConfig};
use crate::error::{Error, Result};
use crate::fairness::{
    assign_groups, assign_groups_at, fit_equalized_odds, group_rates, median, mixing_scores,
    sample_mixing, DerivedRates, Group, GroupRates, MixingParameters,
};
use crate::features::{assemble_instance, extract_social_features, LabeledInstance, FEATURE_DIM};
use crate::features::{extract_text_features, Lexicon, SmileyPatterns};
use crate::graph::{load_edge_list, DirectedGraph};
use crate::model::{threshold_labels, DaggingEnsemble, LogisticLearner};
use crate::sampling::{
    shuffle_split, smote_balance, Dataset, Provenance, SmoteConfig, SplitConfig,
};
use crate::stats::{aggregate_trials, auc_roc, Aggregate, Condition, Metrics, TrialMetrics};

/// Largest tolerated share of failed trials.
pub const MAX_FAILED_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CorpusSource {
    Synthetic(SyntheticConfig),
    /// Messages file plus an optional extra edge list. Message edges are
    /// always part of the graph.
    Files {
        messages: PathBuf,
        edges: Option<PathBuf>,
    },
}

/// Which sensitive values define the high/low median cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MedianScope {
    TestSplit,
    Global,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub train_fraction: f64,
    pub smote_k: usize,
    pub undersample_fraction: f64,
    pub fold_count: usize,
    pub threshold: f64,
    pub alpha: f64,
    pub master_seed: u64,
    /// Bundled word lists are used when unset.
    pub lexicon: Option<PathBuf>,
    pub smileys: Option<PathBuf>,
    pub corpus: CorpusSource,
    pub median_scope: MedianScope,
    pub learner: LogisticLearner,
}

impl ExperimentConfig {
    pub fn new(master_seed: u64, corpus: CorpusSource) -> Self {
        ExperimentConfig {
            trials: 100,
            train_fraction: 0.7,
            smote_k: 5,
            undersample_fraction: 0.0,
            fold_count: crate::model::DEFAULT_FOLDS,
            threshold: crate::model::DEFAULT_THRESHOLD,
            alpha: crate::stats::DEFAULT_ALPHA,
            master_seed,
            lexicon: None,
            smileys: None,
            corpus,
            median_scope: MedianScope::TestSplit,
            learner: LogisticLearner::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.trials < 2 {
            return bad(format!("trials must be at least 2, got {}", self.trials));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            ));
        }
        if self.smote_k == 0 {
            return bad("smote_k must be positive".into());
        }
        if !(0.0..1.0).contains(&self.undersample_fraction) {
            return bad(format!(
                "undersample_fraction must lie in [0, 1), got {}",
                self.undersample_fraction
            ));
        }
        if self.fold_count == 0 {
            return bad("fold_count must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return bad(format!(
                "threshold must lie in [0, 1], got {}",
                self.threshold
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        let LogisticLearner { epochs, step, l2 } = self.learner;
        if epochs == 0 || step.is_nan() || step <= 0.0 || l2.is_nan() || l2 < 0.0 {
            return bad("learner needs epochs > 0, step > 0 and l2 ≥ 0".into());
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` (0-based): one splitmix64 step from
/// `master_seed + index · φ64`. Distinct indices give distinct seeds.
pub fn trial_seed(master_seed: u64, index: usize) -> u64 {
    splitmix64(master_seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

#[derive(Debug, Clone, Copy)]
enum Stage {
    Split = 1,
    Smote = 2,
    Dagging = 3,
    Mixing = 4,
}

fn stage_seed(trial_seed: u64, stage: Stage) -> u64 {
    splitmix64(trial_seed ^ (stage as u64).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Graph and instances shared read-only by every trial.
#[derive(Debug, Clone)]
pub struct PreparedCorpus {
    pub graph: DirectedGraph,
    pub records: Vec<MessageRecord>,
    pub data: Dataset,
    /// Number of per-message feature extractions performed.
    pub extractions: usize,
}

impl PreparedCorpus {
    pub fn build(
        records: Vec<MessageRecord>,
        extra_edges: &[(String, String)],
        lexicon: &Lexicon,
        smileys: &SmileyPatterns,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Dataset("corpus has no messages".into()));
        }
        let graph = DirectedGraph::from_edges(
            records
                .iter()
                .map(|r| (r.sender.as_str(), r.recipient.as_str()))
                .chain(extra_edges.iter().map(|(a, b)| (a.as_str(), b.as_str()))),
        );
        let counter = AtomicUsize::new(0);
        let instances = records
            .par_iter()
            .map(|r| {
                counter.fetch_add(1, Ordering::Relaxed);
                extract_instance(&graph, r, lexicon, smileys)
            })
            .collect::<Result<Vec<_>>>()?;
        let data = Dataset::new(instances, Provenance::Real)?;
        Ok(PreparedCorpus {
            graph,
            records,
            data,
            extractions: counter.into_inner(),
        })
    }

    pub fn load(cfg: &ExperimentConfig) -> Result<Self> {
        let lexicon = match &cfg.lexicon {
            Some(p) => Lexicon::load(p)?,
            None => Lexicon::bundled(),
        };
        let smileys = match &cfg.smileys {
            Some(p) => SmileyPatterns::load(p)?,
            None => SmileyPatterns::bundled(),
        };
        let (records, extra) = match &cfg.corpus {
            CorpusSource::Synthetic(s) => (generate_synthetic(s)?, Vec::new()),
            CorpusSource::Files { messages, edges } => {
                let extra = match edges {
                    Some(p) => load_edge_list(p)?,
                    None => Vec::new(),
                };
                (load_messages(messages)?, extra)
            }
        };
        Self::build(records, &extra, &lexicon, &smileys)
    }
}

pub fn extract_instance(
    graph: &DirectedGraph,
    record: &MessageRecord,
    lexicon: &Lexicon,
    smileys: &SmileyPatterns,
) -> Result<LabeledInstance> {
    let social = extract_social_features(graph, &record.sender, &record.recipient)?;
    let text = extract_text_features(&record.text, lexicon, smileys);
    Ok(assemble_instance(
        &social,
        &text,
        record.label,
        record.message_id.clone(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    pub train_size: usize,
    pub balanced_size: usize,
    pub test_size: usize,
    pub test_positives: usize,
    pub median_used: f64,
    pub rates: GroupRates,
    pub mixing: MixingParameters,
    pub derived: DerivedRates,
    pub baseline: TrialMetrics,
    pub debiased: TrialMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub index: usize,
    pub seed: u64,
    pub error: String,
}

fn check_dim(got: usize) -> Result<()> {
    if got == FEATURE_DIM {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: FEATURE_DIM,
            got,
        })
    }
}

fn rate(hits: usize, total: usize) -> f64 {
    hits as f64 / total as f64
}

/// TPR, FPR and AUC over the instances selected by `keep`. `decisions` are
/// hard labels; `scores` rank instances for the AUC.
fn metrics_where(
    labels: &[bool],
    decisions: &[bool],
    scores: &[f64],
    keep: impl Fn(usize) -> bool,
) -> Result<Metrics> {
    let (mut tp, mut pos, mut fp, mut neg) = (0, 0, 0, 0);
    let mut sub_labels = Vec::new();
    let mut sub_scores = Vec::new();
    for i in (0..labels.len()).filter(|&i| keep(i)) {
        if labels[i] {
            pos += 1;
            tp += usize::from(decisions[i]);
        } else {
            neg += 1;
            fp += usize::from(decisions[i]);
        }
        sub_labels.push(labels[i]);
        sub_scores.push(scores[i]);
    }
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    Ok(Metrics {
        tpr: rate(tp, pos),
        fpr: rate(fp, neg),
        auc: auc_roc(&sub_labels, &sub_scores)?,
    })
}

fn trial_metrics(
    seed: u64,
    condition: Condition,
    labels: &[bool],
    decisions: &[bool],
    scores: &[f64],
    groups: &[Group],
) -> Result<TrialMetrics> {
    Ok(TrialMetrics {
        seed,
        condition,
        high: metrics_where(labels, decisions, scores, |i| groups[i] == Group::High)?,
        low: metrics_where(labels, decisions, scores, |i| groups[i] == Group::Low)?,
        overall: metrics_where(labels, decisions, scores, |_| true)?,
    })
}

/// One audit round. Depends only on the prepared corpus, the config and the
/// trial index.
pub fn run_trial(
    corpus: &PreparedCorpus,
    cfg: &ExperimentConfig,
    index: usize,
) -> Result<TrialRecord> {
    let seed = trial_seed(cfg.master_seed, index);
    let (train, test) = shuffle_split(
        &corpus.data,
        &SplitConfig {
            train_fraction: cfg.train_fraction,
            seed: stage_seed(seed, Stage::Split),
        },
    )?;
    let balanced = smote_balance(
        &train,
        &SmoteConfig {
            k: cfg.smote_k,
            undersample_fraction: cfg.undersample_fraction,
            seed: stage_seed(seed, Stage::Smote),
        },
    )?;
    check_dim(balanced.dim())?;
    let ensemble = DaggingEnsemble::train(
        &cfg.learner,
        &balanced,
        cfg.fold_count,
        stage_seed(seed, Stage::Dagging),
    )?;
    check_dim(ensemble.dim())?;

    let scores = ensemble.predict_scores(&test)?;
    let preds = threshold_labels(&scores, cfg.threshold);
    let labels = test.labels();
    let sensitive: Vec<f64> = test.instances.iter().map(|x| x.sensitive_value).collect();
    let assignment = match cfg.median_scope {
        MedianScope::TestSplit => assign_groups(&sensitive)?,
        MedianScope::Global => {
            let all: Vec<f64> = corpus
                .data
                .instances
                .iter()
                .map(|x| x.sensitive_value)
                .collect();
            assign_groups_at(&sensitive, median(&all))?
        }
    };
    let groups = &assignment.groups;
    let rates = group_rates(&labels, &preds, groups)?;
    let baseline = trial_metrics(seed, Condition::Baseline, &labels, &preds, &scores, groups)?;

    let (mixing, derived) = fit_equalized_odds(&rates)?;
    let mixed = sample_mixing(&preds, groups, &mixing, stage_seed(seed, Stage::Mixing));
    let expected = mixing_scores(&preds, groups, &mixing);
    let debiased = trial_metrics(
        seed,
        Condition::Debiased,
        &labels,
        &mixed,
        &expected,
        groups,
    )?;

    Ok(TrialRecord {
        index,
        seed,
        train_size: train.len(),
        balanced_size: balanced.len(),
        test_size: test.len(),
        test_positives: test.positives(),
        median_used: assignment.median_used,
        rates,
        mixing,
        derived,
        baseline,
        debiased,
    })
}

/// Successful trials in index order, and the failures.
pub fn run_trials(
    corpus: &PreparedCorpus,
    cfg: &ExperimentConfig,
    parallel: bool,
) -> (Vec<TrialRecord>, Vec<TrialFailure>) {
    let one = |index: usize| (index, run_trial(corpus, cfg, index));
    let outcomes: Vec<(usize, Result<TrialRecord>)> = if parallel {
        (0..cfg.trials).into_par_iter().map(one).collect()
    } else {
        (0..cfg.trials).map(one).collect()
    };
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for (index, outcome) in outcomes {
        match outcome {
            Ok(record) => ok.push(record),
            Err(e) => failed.push(TrialFailure {
                index,
                seed: trial_seed(cfg.master_seed, index),
                error: e.to_string(),
            }),
        }
    }
    (ok, failed)
}

pub fn aggregate_records(records: &[TrialRecord], alpha: f64) -> Result<Aggregate> {
    let trials: Vec<TrialMetrics> = records
        .iter()
        .flat_map(|r| [r.baseline, r.debiased])
        .collect();
    aggregate_trials(&trials, alpha)
}

/// Applies the failed-trial policy.
pub fn check_failures(failed: usize, total: usize) -> Result<()> {
    if failed as f64 > MAX_FAILED_FRACTION * total as f64 {
        Err(Error::Aborted { failed, total })
    } else {
        Ok(())
    }
}
