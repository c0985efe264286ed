//! Dagging ensemble with soft voting over a pluggable base learner.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::Dataset;

pub const DEFAULT_FOLDS: usize = 10;
pub const DEFAULT_THRESHOLD: f64 = 0.5;
const STD_FLOOR: f64 = 1e-9;

/// A learner producing scores in `[0, 1]`; training must be deterministic
/// given the seed.
pub trait BaseLearner: Sync {
    type Model: Scorer + Send + Sync;

    fn fit(&self, features: &[&[f64]], labels: &[bool], seed: u64) -> Result<Self::Model>;
}

pub trait Scorer {
    fn score(&self, features: &[f64]) -> f64;
}

/// L2-regularized logistic regression trained by full-batch gradient descent
/// from a zero start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticLearner {
    pub epochs: usize,
    pub step: f64,
    pub l2: f64,
}

impl Default for LogisticLearner {
    fn default() -> Self {
        LogisticLearner {
            epochs: 200,
            step: 0.1,
            l2: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub bias: f64,
    pub weights: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Scorer for LogisticModel {
    fn score(&self, features: &[f64]) -> f64 {
        let z = self.bias
            + self
                .weights
                .iter()
                .zip(features)
                .map(|(w, x)| w * x)
                .sum::<f64>();
        sigmoid(z)
    }
}

impl BaseLearner for LogisticLearner {
    type Model = LogisticModel;

    fn fit(&self, features: &[&[f64]], labels: &[bool], _seed: u64) -> Result<LogisticModel> {
        if features.is_empty() || features.len() != labels.len() {
            return Err(Error::InvalidParameter(
                "logistic learner needs a non-empty, label-aligned training set".into(),
            ));
        }
        let dim = features[0].len();
        let n = features.len() as f64;
        let mut model = LogisticModel {
            bias: 0.0,
            weights: vec![0.0; dim],
        };
        let mut grad = vec![0.0; dim];
        for _ in 0..self.epochs {
            grad.fill(0.0);
            let mut grad_bias = 0.0;
            for (x, &y) in features.iter().zip(labels) {
                let err = model.score(x) - if y { 1.0 } else { 0.0 };
                grad_bias += err;
                for (g, xi) in grad.iter_mut().zip(x.iter()) {
                    *g += err * xi;
                }
            }
            model.bias -= self.step * grad_bias / n;
            for (w, g) in model.weights.iter_mut().zip(&grad) {
                *w -= self.step * (g / n + self.l2 * *w);
            }
        }
        Ok(model)
    }
}

/// Per-feature z-scoring with statistics from the training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(features: &[&[f64]]) -> Self {
        let dim = features.first().map_or(0, |f| f.len());
        let n = features.len().max(1) as f64;
        let mut means = vec![0.0; dim];
        for f in features {
            for (m, x) in means.iter_mut().zip(f.iter()) {
                *m += x;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut stds = vec![0.0; dim];
        for f in features {
            for ((s, x), m) in stds.iter_mut().zip(f.iter()).zip(&means) {
                *s += (x - m) * (x - m);
            }
        }
        stds.iter_mut()
            .for_each(|s| *s = (*s / n).sqrt().max(STD_FLOOR));
        Standardizer { means, stds }
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn apply(&self, features: &[f64]) -> Vec<f64> {
        features
            .iter()
            .zip(&self.means)
            .zip(&self.stds)
            .map(|((x, m), s)| (x - m) / s)
            .collect()
    }
}

/// One base model per disjoint stratified fold; scores are the mean of the
/// members' scores.
#[derive(Debug, Clone, PartialEq)]
pub struct DaggingEnsemble<M> {
    pub standardizer: Standardizer,
    pub members: Vec<M>,
}

/// Assigns each instance to one of `fold_count` folds: positives then
/// negatives, each shuffled, dealt round-robin. Indices within a fold stay
/// in ascending order.
pub fn stratified_folds(labels: &[bool], fold_count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let mut neg: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let mut folds = vec![Vec::new(); fold_count];
    for (slot, i) in pos.into_iter().chain(neg).enumerate() {
        folds[slot % fold_count].push(i);
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    folds
}

impl<M: Scorer + Send + Sync> DaggingEnsemble<M> {
    pub fn train<L>(learner: &L, train: &Dataset, fold_count: usize, seed: u64) -> Result<Self>
    where
        L: BaseLearner<Model = M>,
    {
        if fold_count == 0 {
            return Err(Error::InvalidParameter("fold_count must be ≥ 1".into()));
        }
        let minority = train.positives().min(train.negatives());
        if fold_count > minority {
            return Err(Error::TooManyFolds {
                folds: fold_count,
                minority,
            });
        }
        let raw = train.features();
        let standardizer = Standardizer::fit(&raw);
        let scaled: Vec<Vec<f64>> = raw.iter().map(|f| standardizer.apply(f)).collect();
        let labels = train.labels();
        let folds = stratified_folds(&labels, fold_count, seed);

        let members = folds
            .par_iter()
            .enumerate()
            .map(|(k, fold)| {
                let x: Vec<&[f64]> = fold.iter().map(|&i| scaled[i].as_slice()).collect();
                let y: Vec<bool> = fold.iter().map(|&i| labels[i]).collect();
                learner.fit(&x, &y, seed.wrapping_add(k as u64))
            })
            .collect::<Result<Vec<M>>>()?;
        Ok(DaggingEnsemble {
            standardizer,
            members,
        })
    }

    pub fn fold_count(&self) -> usize {
        self.members.len()
    }

    pub fn dim(&self) -> usize {
        self.standardizer.dim()
    }

    pub fn score(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: features.len(),
            });
        }
        let x = self.standardizer.apply(features);
        Ok(soft_vote(self.members.iter().map(|m| m.score(&x))))
    }

    pub fn predict_scores(&self, data: &Dataset) -> Result<Vec<f64>> {
        data.instances
            .iter()
            .map(|i| self.score(&i.model_features))
            .collect()
    }
}

/// Arithmetic mean of member scores.
pub fn soft_vote(scores: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = scores
        .into_iter()
        .fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

/// Label 1 iff score ≥ threshold.
pub fn threshold_labels(scores: &[f64], threshold: f64) -> Vec<bool> {
    scores.iter().map(|&s| s >= threshold).collect()
}

const MAGIC: &str = "netfair-dagging";
const FORMAT_VERSION: u32 = 1;

impl DaggingEnsemble<LogisticModel> {
    /// Line-oriented text dump: magic header, version, dimensions, then the
    /// standardization statistics and one line per member.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |xs: &[f64]| {
            xs.iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(out, "{MAGIC} {FORMAT_VERSION}");
        let _ = writeln!(out, "dim {}", self.dim());
        let _ = writeln!(out, "folds {}", self.members.len());
        let _ = writeln!(out, "mean {}", join(&self.standardizer.means));
        let _ = writeln!(out, "std {}", join(&self.standardizer.stds));
        for m in &self.members {
            let _ = writeln!(out, "member {:?} {}", m.bias, join(&m.weights));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::ModelFormat(msg.to_owned());
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty input"))?;
        let version = header
            .strip_prefix(MAGIC)
            .ok_or_else(|| bad("missing magic header"))?
            .trim()
            .parse::<u32>()
            .map_err(|_| bad("unreadable version"))?;
        if version != FORMAT_VERSION {
            return Err(Error::ModelFormat(format!("unsupported version {version}")));
        }
        let mut field = |name: &str| -> Result<Vec<String>> {
            let line = lines
                .next()
                .ok_or_else(|| Error::ModelFormat(format!("missing '{name}' line")))?;
            let mut parts = line.split_whitespace();
            if parts.next() != Some(name) {
                return Err(Error::ModelFormat(format!("expected '{name}' line")));
            }
            Ok(parts.map(str::to_owned).collect())
        };
        let parse_usize = |v: Vec<String>| -> Result<usize> {
            v.first()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("unreadable integer"))
        };
        let parse_floats = |v: &[String]| -> Result<Vec<f64>> {
            v.iter()
                .map(|s| s.parse::<f64>().map_err(|_| bad("unreadable number")))
                .collect()
        };
        let dim = parse_usize(field("dim")?)?;
        let folds = parse_usize(field("folds")?)?;
        let means = parse_floats(&field("mean")?)?;
        let stds = parse_floats(&field("std")?)?;
        if means.len() != dim || stds.len() != dim {
            return Err(bad("standardization length does not match dim"));
        }
        let mut members = Vec::with_capacity(folds);
        for _ in 0..folds {
            let values = parse_floats(&field("member")?)?;
            if values.len() != dim + 1 {
                return Err(bad("member length does not match dim"));
            }
            members.push(LogisticModel {
                bias: values[0],
                weights: values[1..].to_vec(),
            });
        }
        Ok(DaggingEnsemble {
            standardizer: Standardizer { means, stds },
            members,
        })
    }
}
