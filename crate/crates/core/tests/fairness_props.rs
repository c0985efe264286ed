mod common;

use netfair::fairness::{
    assign_groups, expected_loss, fit_equalized_odds, group_rates, median, sample_mixing, Group,
    GroupRates, GroupStats, MixingParameters,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rates() -> impl Strategy<Value = GroupRates> {
    any::<u64>().prop_map(|seed| common::random_group_rates(&mut ChaCha8Rng::seed_from_u64(seed)))
}

proptest! {
    #[test]
    fn lp_solution_is_feasible_and_optimal(r in rates()) {
        let (p, d) = fit_equalized_odds(&r).unwrap();
        for x in [p.p00, p.p01, p.p10, p.p11] {
            prop_assert!((0.0..=1.0).contains(&x));
        }
        prop_assert!((d.low.tpr - d.high.tpr).abs() <= 1e-9);
        prop_assert!((d.low.fpr - d.high.fpr).abs() <= 1e-9);
        prop_assert!((d.expected_loss - expected_loss(&p, &r)).abs() < 1e-15);
        // Constant predictors are always equalized-odds feasible.
        let zero = MixingParameters { p00: 0.0, p01: 0.0, p10: 0.0, p11: 0.0 };
        let one = MixingParameters { p00: 1.0, p01: 1.0, p10: 1.0, p11: 1.0 };
        prop_assert!(d.expected_loss <= expected_loss(&zero, &r) + 1e-12);
        prop_assert!(d.expected_loss <= expected_loss(&one, &r) + 1e-12);
        let grid = common::grid_min_loss(&r, 101);
        prop_assert!(d.expected_loss <= grid + 1e-12);
    }

    #[test]
    fn equal_groups_keep_the_identity(fpr in 0.0f64..0.45, gain in 0.1f64..0.5, mass in 0.1f64..0.9) {
        let g = |m| GroupStats::from_rates(fpr, fpr + gain, 0.5, m);
        let r = GroupRates { low: g(mass), high: g(1.0 - mass) };
        let (p, _) = fit_equalized_odds(&r).unwrap();
        prop_assert!((p.p11 - 1.0).abs() < 1e-9 && (p.p10 - 1.0).abs() < 1e-9);
        prop_assert!(p.p00.abs() < 1e-9 && p.p01.abs() < 1e-9);
    }

    #[test]
    fn groups_split_at_the_median(values in prop::collection::vec(0.0f64..1.0, 2..50)) {
        let a = assign_groups(&values).unwrap();
        let m = median(&values);
        prop_assert_eq!(a.median_used, m);
        for (v, g) in values.iter().zip(&a.groups) {
            prop_assert_eq!(*g == Group::High, *v >= m);
        }
    }
}

#[test]
fn expected_loss_matches_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 200_000;
    let mut labels = Vec::with_capacity(n);
    let mut preds = Vec::with_capacity(n);
    let mut groups = Vec::with_capacity(n);
    for _ in 0..n {
        let g = if rng.gen_bool(0.4) {
            Group::Low
        } else {
            Group::High
        };
        let y = rng.gen_bool(if g == Group::Low { 0.3 } else { 0.5 });
        let hit = if y { [0.6, 0.85] } else { [0.15, 0.3] }[g as usize];
        labels.push(y);
        preds.push(rng.gen_bool(hit));
        groups.push(g);
    }
    let r = group_rates(&labels, &preds, &groups).unwrap();
    let (p, d) = fit_equalized_odds(&r).unwrap();
    let mixed = sample_mixing(&preds, &groups, &p, 5);
    let errors = labels.iter().zip(&mixed).filter(|(y, z)| y != z).count() as f64 / n as f64;
    let se = (d.expected_loss * (1.0 - d.expected_loss) / n as f64).sqrt();
    assert!(
        (errors - d.expected_loss).abs() < 4.0 * se,
        "{errors} vs {}",
        d.expected_loss
    );
}

#[test]
fn sampled_mixing_is_seeded() {
    let preds = vec![true, false, true, true, false, false];
    let groups = vec![
        Group::Low,
        Group::Low,
        Group::High,
        Group::High,
        Group::Low,
        Group::High,
    ];
    let p = MixingParameters {
        p00: 0.3,
        p01: 0.6,
        p10: 0.8,
        p11: 0.4,
    };
    assert_eq!(
        sample_mixing(&preds, &groups, &p, 9),
        sample_mixing(&preds, &groups, &p, 9)
    );
}
