//! Shuffled train/test splitting and SMOTE rebalancing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::LabeledInstance;

const SPLIT_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Real,
    Synthetic,
    SmoteAugmented,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub instances: Vec<LabeledInstance>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn new(instances: Vec<LabeledInstance>, provenance: Provenance) -> Result<Self> {
        if let Some(first) = instances.first() {
            let dim = first.model_features.len();
            if let Some(bad) = instances.iter().find(|i| i.model_features.len() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: bad.model_features.len(),
                });
            }
        }
        Ok(Dataset {
            instances,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.instances.first().map_or(0, |i| i.model_features.len())
    }

    pub fn positives(&self) -> usize {
        self.instances.iter().filter(|i| i.label).count()
    }

    pub fn negatives(&self) -> usize {
        self.len() - self.positives()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.instances.iter().map(|i| i.label).collect()
    }

    pub fn features(&self) -> Vec<&[f64]> {
        self.instances
            .iter()
            .map(|i| i.model_features.as_slice())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub seed: u64,
}

impl SplitConfig {
    pub fn new(seed: u64) -> Self {
        SplitConfig {
            train_fraction: 0.7,
            seed,
        }
    }
}

/// Number of training instances for `n` instances: `round(fraction * n)`.
pub fn train_size(n: usize, train_fraction: f64) -> usize {
    (train_fraction * n as f64).round() as usize
}

/// Shuffles and splits, retrying the shuffle until both classes appear on
/// both sides.
pub fn shuffle_split(data: &Dataset, cfg: &SplitConfig) -> Result<(Dataset, Dataset)> {
    if !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train_fraction must lie in (0, 1), got {}",
            cfg.train_fraction
        )));
    }
    let (pos, neg) = (data.positives(), data.negatives());
    if pos == 0 || neg == 0 {
        return Err(Error::Dataset(
            "single-class dataset cannot be split".into(),
        ));
    }
    if pos < 2 || neg < 2 {
        return Err(Error::Dataset(format!(
            "splitting needs at least 2 instances of each class (positives {pos}, negatives {neg})"
        )));
    }

    let n = data.len();
    let n_train = train_size(n, cfg.train_fraction);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let covers = |idx: &[usize]| {
        let p = idx.iter().filter(|&&i| data.instances[i].label).count();
        p > 0 && p < idx.len()
    };
    for _ in 0..SPLIT_RETRIES {
        order.shuffle(&mut rng);
        let (train, test) = order.split_at(n_train);
        if covers(train) && covers(test) {
            let take = |idx: &[usize]| idx.iter().map(|&i| data.instances[i].clone()).collect();
            return Ok((
                Dataset {
                    instances: take(train),
                    provenance: data.provenance,
                },
                Dataset {
                    instances: take(test),
                    provenance: data.provenance,
                },
            ));
        }
    }
    Err(Error::Dataset(format!(
        "no split with both classes on both sides after {SPLIT_RETRIES} shuffles"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoteConfig {
    pub k: usize,
    pub undersample_fraction: f64,
    pub seed: u64,
}

impl SmoteConfig {
    pub fn new(seed: u64) -> Self {
        SmoteConfig {
            k: 5,
            undersample_fraction: 0.0,
            seed,
        }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices (into `points`) of the `k` nearest other points, nearest first;
/// equal distances resolve to the lower index.
fn nearest_neighbors(points: &[&LabeledInstance], k: usize) -> Vec<Vec<usize>> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut others: Vec<(f64, usize)> = points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, q)| (squared_distance(&p.model_features, &q.model_features), j))
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            others.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect()
}

/// Randomly undersamples the majority class by `undersample_fraction`, then
/// grows the minority class to parity with synthetic interpolants.
pub fn smote_balance(train: &Dataset, cfg: &SmoteConfig) -> Result<Dataset> {
    if cfg.k == 0 {
        return Err(Error::InvalidParameter("SMOTE k must be ≥ 1".into()));
    }
    if !(0.0..1.0).contains(&cfg.undersample_fraction) {
        return Err(Error::InvalidParameter(format!(
            "undersample_fraction must lie in [0, 1), got {}",
            cfg.undersample_fraction
        )));
    }
    let positives = train.positives();
    let minority_label = positives <= train.negatives();
    let (minority, mut majority): (Vec<&LabeledInstance>, Vec<&LabeledInstance>) = train
        .instances
        .iter()
        .partition(|i| i.label == minority_label);
    if minority.len() < 2 {
        return Err(Error::SmoteMinority(minority.len()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let drop = (cfg.undersample_fraction * majority.len() as f64).round() as usize;
    let keep = majority.len().saturating_sub(drop).max(minority.len());
    if keep < majority.len() {
        majority.shuffle(&mut rng);
        majority.truncate(keep);
    }

    let needed = keep - minority.len();
    let k = cfg.k.min(minority.len() - 1);
    let neighbors = nearest_neighbors(&minority, k);

    let mut out: Vec<LabeledInstance> = Vec::with_capacity(2 * keep);
    out.extend(majority.iter().map(|&i| i.clone()));
    out.extend(minority.iter().map(|&i| i.clone()));
    for j in 0..needed {
        let seed_idx = j % minority.len();
        let x = minority[seed_idx];
        let nn = minority[neighbors[seed_idx][rng.gen_range(0..k)]];
        let u: f64 = rng.gen();
        let features = x
            .model_features
            .iter()
            .zip(&nn.model_features)
            .map(|(a, b)| a + u * (b - a))
            .collect();
        out.push(LabeledInstance {
            message_id: format!("{}#smote{}", x.message_id, j),
            model_features: features,
            label: minority_label,
            sensitive_value: x.sensitive_value,
        });
    }
    out.shuffle(&mut rng);
    Ok(Dataset {
        instances: out,
        provenance: Provenance::SmoteAugmented,
    })
}
