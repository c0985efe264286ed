mod common;

use std::collections::{BTreeSet, HashMap};

use netfair::sampling::{
    shuffle_split, smote_balance, train_size, Dataset, Provenance, SmoteConfig, SplitConfig,
};
use proptest::prelude::*;

fn dataset() -> impl Strategy<Value = Dataset> {
    (2usize..12, 15usize..60, 1usize..4).prop_flat_map(|(pos, neg, dim)| {
        prop::collection::vec(prop::collection::vec(-10.0f64..10.0, dim), pos + neg).prop_map(
            move |rows| {
                let instances = rows
                    .into_iter()
                    .enumerate()
                    .map(|(i, f)| common::instance(i, f, i < pos, i as f64 / 100.0))
                    .collect();
                Dataset::new(instances, Provenance::Real).unwrap()
            },
        )
    })
}

proptest! {
    #[test]
    fn smote_balances_inside_minority_box(data in dataset(), k in 1usize..7, seed in any::<u64>()) {
        let out = smote_balance(&data, &SmoteConfig { k, undersample_fraction: 0.0, seed }).unwrap();
        prop_assert_eq!(out.positives(), out.negatives());
        prop_assert_eq!(out.negatives(), data.negatives());
        let minority: Vec<_> = data.instances.iter().filter(|x| x.label).collect();
        let sensitive: BTreeSet<u64> = minority.iter().map(|x| x.sensitive_value.to_bits()).collect();
        for x in out.instances.iter().filter(|x| x.label) {
            for d in 0..data.dim() {
                let lo = minority.iter().map(|m| m.model_features[d]).fold(f64::INFINITY, f64::min);
                let hi = minority.iter().map(|m| m.model_features[d]).fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(x.model_features[d] >= lo && x.model_features[d] <= hi);
            }
            // Synthetic points inherit the sensitive value of a real minority point.
            prop_assert!(sensitive.contains(&x.sensitive_value.to_bits()));
        }
    }

    #[test]
    fn undersampling_keeps_at_least_the_minority(data in dataset(), frac in 0.0f64..0.99, seed in any::<u64>()) {
        let out = smote_balance(&data, &SmoteConfig { k: 3, undersample_fraction: frac, seed }).unwrap();
        prop_assert_eq!(out.positives(), out.negatives());
        prop_assert!(out.negatives() >= data.positives());
        prop_assert!(out.negatives() <= data.negatives());
        // Retained majority rows are originals.
        let originals: HashMap<&str, &Vec<f64>> = data.instances.iter().map(|x| (x.message_id.as_str(), &x.model_features)).collect();
        for x in out.instances.iter().filter(|x| !x.label) {
            prop_assert_eq!(originals.get(x.message_id.as_str()), Some(&&x.model_features));
        }
    }

    #[test]
    fn split_partitions_the_data(data in dataset(), frac in 0.3f64..0.8, seed in any::<u64>()) {
        let (train, test) = shuffle_split(&data, &SplitConfig { train_fraction: frac, seed }).unwrap();
        prop_assert_eq!(train.len(), train_size(data.len(), frac));
        prop_assert_eq!(train.len() + test.len(), data.len());
        let ids: BTreeSet<&str> = train.instances.iter().chain(&test.instances).map(|x| x.message_id.as_str()).collect();
        prop_assert_eq!(ids.len(), data.len());
        prop_assert!(train.positives() > 0 && train.negatives() > 0);
        prop_assert!(test.positives() > 0 && test.negatives() > 0);
        let again = shuffle_split(&data, &SplitConfig { train_fraction: frac, seed }).unwrap();
        prop_assert_eq!(&again.0.instances, &train.instances);
    }
}

#[test]
fn smote_rejects_a_single_minority_point() {
    let instances = (0..10)
        .map(|i| common::instance(i, vec![i as f64], i == 0, 0.0))
        .collect();
    let data = Dataset::new(instances, Provenance::Real).unwrap();
    assert!(matches!(
        smote_balance(&data, &SmoteConfig::new(1)),
        Err(netfair::Error::SmoteMinority(1))
    ));
}
