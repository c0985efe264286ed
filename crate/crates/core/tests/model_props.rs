mod common;

use netfair::model::{
    soft_vote, stratified_folds, threshold_labels, DaggingEnsemble, LogisticLearner, LogisticModel,
};
use netfair::sampling::{Dataset, Provenance};
use netfair::stats::auc_roc;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Two Gaussian blobs in 3-d, `gap` standard deviations apart along x.
fn blobs(n_per_class: usize, gap: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::new();
    for i in 0..2 * n_per_class {
        let label = i % 2 == 0;
        let shift = if label { gap } else { 0.0 };
        let f = vec![
            shift + common::normal(&mut rng),
            common::normal(&mut rng),
            5.0 * common::normal(&mut rng),
        ];
        instances.push(common::instance(i, f, label, 0.0));
    }
    Dataset::new(instances, Provenance::Real).unwrap()
}

#[test]
fn separable_blobs_are_ranked_perfectly() {
    let train = blobs(200, 20.0, 1);
    let test = blobs(100, 20.0, 2);
    let model = DaggingEnsemble::train(&LogisticLearner::default(), &train, 10, 3).unwrap();
    let scores = model.predict_scores(&test).unwrap();
    let auc = auc_roc(&test.labels(), &scores).unwrap();
    assert!((auc - 1.0).abs() < 1e-9, "auc {auc}");
    let preds = threshold_labels(&scores, 0.5);
    assert_eq!(preds, test.labels());
}

#[test]
fn overlapping_blobs_beat_chance() {
    let train = blobs(300, 1.5, 4);
    let test = blobs(300, 1.5, 5);
    let model = DaggingEnsemble::train(&LogisticLearner::default(), &train, 10, 6).unwrap();
    let auc = auc_roc(&test.labels(), &model.predict_scores(&test).unwrap()).unwrap();
    // Bayes AUC for a 1.5 sd mean shift is Φ(1.5/√2) ≈ 0.856.
    assert!(auc > 0.8 && auc < 0.9, "auc {auc}");
}

#[test]
fn training_is_deterministic_and_round_trips() {
    let data = blobs(80, 2.0, 7);
    let a = DaggingEnsemble::train(&LogisticLearner::default(), &data, 5, 8).unwrap();
    let b = DaggingEnsemble::train(&LogisticLearner::default(), &data, 5, 8).unwrap();
    assert_eq!(a.to_text(), b.to_text());
    let restored = DaggingEnsemble::<LogisticModel>::from_text(&a.to_text()).unwrap();
    assert_eq!(restored.to_text(), a.to_text());
    for x in &data.instances {
        assert_eq!(
            restored.score(&x.model_features).unwrap(),
            a.score(&x.model_features).unwrap()
        );
    }
}

#[test]
fn one_fold_is_a_single_learner_on_everything() {
    let data = blobs(50, 2.0, 9);
    let single = DaggingEnsemble::train(&LogisticLearner::default(), &data, 1, 1).unwrap();
    let other = DaggingEnsemble::train(&LogisticLearner::default(), &data, 1, 999).unwrap();
    assert_eq!(single.to_text(), other.to_text());
}

#[test]
fn too_many_folds_is_rejected() {
    let data = blobs(3, 2.0, 10);
    assert!(matches!(
        DaggingEnsemble::train(&LogisticLearner::default(), &data, 4, 0),
        Err(netfair::Error::TooManyFolds { .. })
    ));
}

#[test]
fn wrong_dimension_is_rejected() {
    let data = blobs(20, 2.0, 11);
    let model = DaggingEnsemble::train(&LogisticLearner::default(), &data, 2, 0).unwrap();
    assert!(matches!(
        model.score(&[1.0, 2.0]),
        Err(netfair::Error::DimensionMismatch {
            expected: 3,
            got: 2
        })
    ));
}

proptest! {
    #[test]
    fn soft_vote_lies_between_members(scores in prop::collection::vec(0.0f64..1.0, 1..20)) {
        let v = soft_vote(scores.iter().copied());
        let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(v >= lo - 1e-15 && v <= hi + 1e-15);
    }

    #[test]
    fn folds_partition_and_stratify(labels in prop::collection::vec(any::<bool>(), 10..80), k in 1usize..5, seed in any::<u64>()) {
        let pos = labels.iter().filter(|&&y| y).count();
        prop_assume!(pos >= k && labels.len() - pos >= k);
        let folds = stratified_folds(&labels, k, seed);
        prop_assert_eq!(folds.len(), k);
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
        for f in &folds {
            let p = f.iter().filter(|&&i| labels[i]).count();
            prop_assert!(p >= pos / k && p <= pos.div_ceil(k));
            prop_assert!(f.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn scores_are_probabilities(seed in any::<u64>()) {
        let data = blobs(30, 1.0, seed);
        let model = DaggingEnsemble::train(&LogisticLearner::default(), &data, 3, seed).unwrap();
        for s in model.predict_scores(&data).unwrap() {
            prop_assert!((0.0..=1.0).contains(&s));
        }
    }
}
