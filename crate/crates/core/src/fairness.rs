//! Median-split group assignment, group-conditional rates and equalized-odds
//! post-processing.
//!
//! A derived predictor flips the base prediction `ŷ` of an instance in group
//! `a` to 1 with probability `p[ŷ][a]`. Within group `a` the achievable
//! `(fpr, tpr)` pairs form the parallelogram spanned by `(0,0)`,
//! `(fpr_a, tpr_a)`, `(1,1)` and `(1 - fpr_a, 1 - tpr_a)`. Equalized odds
//! requires both groups to land on the same point; since the expected 0-1
//! loss is linear in that common point, the optimum sits on a vertex of the
//! intersection of the two parallelograms, which is found by enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Low = 0,
    High = 1,
}

impl Group {
    pub fn name(self) -> &'static str {
        match self {
            Group::Low => "low",
            Group::High => "high",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAssignment {
    pub groups: Vec<Group>,
    pub median_used: f64,
}

/// Midpoint of the two middle values for even counts.
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Splits at the median: values ≥ median are `High`.
pub fn assign_groups(values: &[f64]) -> Result<GroupAssignment> {
    if values.len() < 2 {
        return Err(Error::InvalidParameter(
            "group assignment needs at least 2 values".into(),
        ));
    }
    assign_groups_at(values, median(values))
}

/// Splits at a caller-supplied cut (e.g. a corpus-wide median).
pub fn assign_groups_at(values: &[f64], cut: f64) -> Result<GroupAssignment> {
    let groups: Vec<Group> = values
        .iter()
        .map(|&v| if v >= cut { Group::High } else { Group::Low })
        .collect();
    if !groups.contains(&Group::Low) || !groups.contains(&Group::High) {
        return Err(Error::DegenerateAttribute);
    }
    Ok(GroupAssignment {
        groups,
        median_used: cut,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn positives(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> usize {
        self.fp + self.tn
    }

    pub fn total(&self) -> usize {
        self.positives() + self.negatives()
    }
}

/// Rates of one group: `γ_a = (fpr, tpr)` plus the group's base rate
/// `Pr{Y=1 | A=a}` and mass `Pr{A=a}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub tpr: f64,
    pub fpr: f64,
    pub base_rate: f64,
    pub mass: f64,
    pub counts: Option<Confusion>,
}

impl GroupStats {
    pub fn from_rates(fpr: f64, tpr: f64, base_rate: f64, mass: f64) -> Self {
        GroupStats {
            tpr,
            fpr,
            base_rate,
            mass,
            counts: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupRates {
    pub low: GroupStats,
    pub high: GroupStats,
}

impl GroupRates {
    pub fn get(&self, group: Group) -> &GroupStats {
        match group {
            Group::Low => &self.low,
            Group::High => &self.high,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, g) in [("low", &self.low), ("high", &self.high)] {
            for (field, v) in [
                ("tpr", g.tpr),
                ("fpr", g.fpr),
                ("base_rate", g.base_rate),
                ("mass", g.mass),
            ] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidParameter(format!(
                        "{name} group {field} = {v} is outside [0, 1]"
                    )));
                }
            }
        }
        if (self.low.mass + self.high.mass - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(
                "group masses do not sum to 1".into(),
            ));
        }
        Ok(())
    }
}

pub fn group_rates(labels: &[bool], preds: &[bool], groups: &[Group]) -> Result<GroupRates> {
    if labels.len() != preds.len() || labels.len() != groups.len() {
        return Err(Error::Mismatch(format!(
            "group_rates: {} labels, {} predictions, {} groups",
            labels.len(),
            preds.len(),
            groups.len()
        )));
    }
    let mut counts = [Confusion::default(); 2];
    for ((&y, &yhat), &g) in labels.iter().zip(preds).zip(groups) {
        let c = &mut counts[g as usize];
        match (y, yhat) {
            (true, true) => c.tp += 1,
            (true, false) => c.fn_ += 1,
            (false, true) => c.fp += 1,
            (false, false) => c.tn += 1,
        }
    }
    let total = labels.len() as f64;
    let stats = |group: Group| -> Result<GroupStats> {
        let c = counts[group as usize];
        if c.positives() == 0 {
            return Err(Error::EmptyCell {
                group: group.name(),
                cell: "positive",
            });
        }
        if c.negatives() == 0 {
            return Err(Error::EmptyCell {
                group: group.name(),
                cell: "negative",
            });
        }
        Ok(GroupStats {
            tpr: c.tp as f64 / c.positives() as f64,
            fpr: c.fp as f64 / c.negatives() as f64,
            base_rate: c.positives() as f64 / c.total() as f64,
            mass: c.total() as f64 / total,
            counts: Some(c),
        })
    };
    Ok(GroupRates {
        low: stats(Group::Low)?,
        high: stats(Group::High)?,
    })
}

/// `p_{ŷa} = Pr{Ỹ=1 | Ŷ=ŷ, A=a}`; first digit is the base prediction,
/// second the group (0 = low, 1 = high).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingParameters {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

impl MixingParameters {
    pub const IDENTITY: MixingParameters = MixingParameters {
        p00: 0.0,
        p01: 0.0,
        p10: 1.0,
        p11: 1.0,
    };

    pub fn get(&self, predicted: bool, group: Group) -> f64 {
        match (predicted, group) {
            (false, Group::Low) => self.p00,
            (false, Group::High) => self.p01,
            (true, Group::Low) => self.p10,
            (true, Group::High) => self.p11,
        }
    }

    /// `(p_{0a}, p_{1a})` for one group.
    pub fn for_group(&self, group: Group) -> (f64, f64) {
        (self.get(false, group), self.get(true, group))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedGroupRates {
    pub tpr: f64,
    pub fpr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedRates {
    pub low: DerivedGroupRates,
    pub high: DerivedGroupRates,
    pub expected_loss: f64,
}

fn derive_group(p: &MixingParameters, stats: &GroupStats, group: Group) -> DerivedGroupRates {
    let (p0, p1) = p.for_group(group);
    DerivedGroupRates {
        tpr: p1 * stats.tpr + p0 * (1.0 - stats.tpr),
        fpr: p1 * stats.fpr + p0 * (1.0 - stats.fpr),
    }
}

fn group_loss(stats: &GroupStats, derived: DerivedGroupRates) -> f64 {
    stats.mass * (stats.base_rate * (1.0 - derived.tpr) + (1.0 - stats.base_rate) * derived.fpr)
}

pub fn derived_rates(p: &MixingParameters, rates: &GroupRates) -> DerivedRates {
    let low = derive_group(p, &rates.low, Group::Low);
    let high = derive_group(p, &rates.high, Group::High);
    DerivedRates {
        low,
        high,
        expected_loss: group_loss(&rates.low, low) + group_loss(&rates.high, high),
    }
}

/// Expected 0-1 loss of the derived predictor.
pub fn expected_loss(p: &MixingParameters, rates: &GroupRates) -> f64 {
    derived_rates(p, rates).expected_loss
}

/// A point in ROC space: `x` = false positive rate, `y` = true positive rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub x: f64,
    pub y: f64,
}

const GEOM_EPS: f64 = 1e-12;

fn cross(o: RocPoint, a: RocPoint, b: RocPoint) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Vertices of the achievable region for a group with rates `(fpr, tpr)`,
/// in boundary order.
pub fn achievable_region(fpr: f64, tpr: f64) -> [RocPoint; 4] {
    [
        RocPoint { x: 0.0, y: 0.0 },
        RocPoint { x: fpr, y: tpr },
        RocPoint { x: 1.0, y: 1.0 },
        RocPoint {
            x: 1.0 - fpr,
            y: 1.0 - tpr,
        },
    ]
}

/// Point-in-convex-polygon for either orientation. A collapsed polygon
/// (all vertices on a line) accepts only points on that line.
fn contains(poly: &[RocPoint; 4], pt: RocPoint) -> bool {
    let (mut neg, mut pos) = (false, false);
    for i in 0..4 {
        let c = cross(poly[i], poly[(i + 1) % 4], pt);
        if c < -GEOM_EPS {
            neg = true;
        }
        if c > GEOM_EPS {
            pos = true;
        }
    }
    !(neg && pos)
}

fn segment_intersection(
    p1: RocPoint,
    p2: RocPoint,
    q1: RocPoint,
    q2: RocPoint,
) -> Option<RocPoint> {
    let r = RocPoint {
        x: p2.x - p1.x,
        y: p2.y - p1.y,
    };
    let s = RocPoint {
        x: q2.x - q1.x,
        y: q2.y - q1.y,
    };
    let denom = r.x * s.y - r.y * s.x;
    if denom.abs() < 1e-15 {
        // Parallel; collinear overlaps are covered by the endpoint candidates.
        return None;
    }
    let qp = RocPoint {
        x: q1.x - p1.x,
        y: q1.y - p1.y,
    };
    let t = (qp.x * s.y - qp.y * s.x) / denom;
    let u = (qp.x * r.y - qp.y * r.x) / denom;
    let range = -GEOM_EPS..=1.0 + GEOM_EPS;
    (range.contains(&t) && range.contains(&u)).then_some(RocPoint {
        x: p1.x + t * r.x,
        y: p1.y + t * r.y,
    })
}

/// Vertices of the intersection of two achievable regions (with possible
/// duplicates). Never empty: `(0,0)` and `(1,1)` belong to every region.
pub fn intersection_vertices(a: &[RocPoint; 4], b: &[RocPoint; 4]) -> Vec<RocPoint> {
    let mut out: Vec<RocPoint> = a.iter().copied().filter(|&v| contains(b, v)).collect();
    out.extend(b.iter().copied().filter(|&v| contains(a, v)));
    for i in 0..4 {
        for j in 0..4 {
            if let Some(pt) = segment_intersection(a[i], a[(i + 1) % 4], b[j], b[(j + 1) % 4]) {
                out.push(pt);
            }
        }
    }
    out
}

/// Mixing probabilities that move a group with rates `(fpr, tpr)` onto the
/// target point, as `(p0, p1)`.
fn mixing_for_target(fpr: f64, tpr: f64, target: RocPoint) -> (f64, f64) {
    let det = tpr - fpr;
    let (p0, p1) = if det.abs() < GEOM_EPS {
        // Region is the diagonal; any p0 = p1 = level reaches (level, level).
        let level = 0.5 * (target.x + target.y);
        (level, level)
    } else {
        (
            (target.x * tpr - target.y * fpr) / det,
            (target.y * (1.0 - fpr) - target.x * (1.0 - tpr)) / det,
        )
    };
    (p0.clamp(0.0, 1.0), p1.clamp(0.0, 1.0))
}

/// Solves the equalized-odds linear program exactly.
pub fn fit_equalized_odds(rates: &GroupRates) -> Result<(MixingParameters, DerivedRates)> {
    rates.validate()?;
    let low = achievable_region(rates.low.fpr, rates.low.tpr);
    let high = achievable_region(rates.high.fpr, rates.high.tpr);

    // Loss at a common target (x, y): Σ_a mass_a [base_a (1 - y) + (1 - base_a) x].
    let weight_pos = rates.low.mass * rates.low.base_rate + rates.high.mass * rates.high.base_rate;
    let weight_neg = rates.low.mass * (1.0 - rates.low.base_rate)
        + rates.high.mass * (1.0 - rates.high.base_rate);
    let loss_at = |pt: RocPoint| weight_pos * (1.0 - pt.y) + weight_neg * pt.x;

    let mut best: Option<(f64, RocPoint)> = None;
    for v in intersection_vertices(&low, &high) {
        let v = RocPoint {
            x: v.x.clamp(0.0, 1.0),
            y: v.y.clamp(0.0, 1.0),
        };
        let loss = loss_at(v);
        if best.is_none_or(|(b, _)| loss < b) {
            best = Some((loss, v));
        }
    }
    let (_, target) = best.expect("origin is always feasible");

    let (p00, p10) = mixing_for_target(rates.low.fpr, rates.low.tpr, target);
    let (p01, p11) = mixing_for_target(rates.high.fpr, rates.high.tpr, target);
    let p = MixingParameters { p00, p01, p10, p11 };
    Ok((p, derived_rates(&p, rates)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixingMode {
    /// Draw each output label, seeded.
    Sampled { seed: u64 },
    /// Output the flip probability itself as a score.
    Expectation,
}

/// Applies the derived predictor; sampled mode yields 0.0/1.0 values.
pub fn apply_mixing(
    preds: &[bool],
    groups: &[Group],
    p: &MixingParameters,
    mode: MixingMode,
) -> Vec<f64> {
    match mode {
        MixingMode::Expectation => mixing_scores(preds, groups, p),
        MixingMode::Sampled { seed } => sample_mixing(preds, groups, p, seed)
            .into_iter()
            .map(|y| if y { 1.0 } else { 0.0 })
            .collect(),
    }
}

pub fn mixing_scores(preds: &[bool], groups: &[Group], p: &MixingParameters) -> Vec<f64> {
    preds
        .iter()
        .zip(groups)
        .map(|(&yhat, &g)| p.get(yhat, g))
        .collect()
}

pub fn sample_mixing(
    preds: &[bool],
    groups: &[Group],
    p: &MixingParameters,
    seed: u64,
) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    preds
        .iter()
        .zip(groups)
        .map(|(&yhat, &g)| rng.gen::<f64>() < p.get(yhat, g))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rates(low: (f64, f64), high: (f64, f64), base: (f64, f64), mass_low: f64) -> GroupRates {
        GroupRates {
            low: GroupStats::from_rates(low.0, low.1, base.0, mass_low),
            high: GroupStats::from_rates(high.0, high.1, base.1, 1.0 - mass_low),
        }
    }

    #[test]
    fn median_split_examples() {
        let a = assign_groups(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(a.median_used, 2.5);
        assert_eq!(a.groups, [Group::Low, Group::Low, Group::High, Group::High]);

        let b = assign_groups(&[1.0, 2.0, 2.0, 3.0]).unwrap();
        assert_eq!(b.median_used, 2.0);
        assert_eq!(
            b.groups,
            [Group::Low, Group::High, Group::High, Group::High]
        );

        let err = assign_groups(&[5.0, 5.0, 5.0]).unwrap_err();
        assert_eq!(
            err.to_string(),
            "degenerate sensitive attribute; audit impossible"
        );
        assert!(assign_groups(&[1.0]).is_err());
    }

    #[test]
    fn rates_by_direct_count() {
        let r = group_rates(
            &[true, true, false, false, true, false],
            &[true, false, true, false, true, false],
            &[
                Group::Low,
                Group::Low,
                Group::Low,
                Group::Low,
                Group::High,
                Group::High,
            ],
        )
        .unwrap();
        assert_eq!((r.low.tpr, r.low.fpr), (0.5, 0.5));
        assert_eq!((r.high.tpr, r.high.fpr), (1.0, 0.0));
        assert_eq!(r.low.base_rate, 0.5);
        assert!((r.low.mass + r.high.mass - 1.0).abs() < 1e-15);
        assert_eq!(r.low.counts.unwrap().total(), 4);
    }

    #[test]
    fn missing_cell_is_named() {
        let err = group_rates(
            &[true, false, false, false],
            &[true, false, false, false],
            &[Group::Low, Group::Low, Group::High, Group::High],
        )
        .unwrap_err();
        assert_eq!(err.to_string(), "group 'high' has no positive instances");
        assert!(group_rates(&[true], &[true, false], &[Group::Low]).is_err());
    }

    #[test]
    fn already_equal_rates_keep_identity() {
        for mass in [0.3, 0.5, 0.8] {
            let r = rates((0.2, 0.8), (0.2, 0.8), (0.5, 0.5), mass);
            let (p, d) = fit_equalized_odds(&r).unwrap();
            assert_eq!(p, MixingParameters::IDENTITY);
            assert!((d.low.tpr - 0.8).abs() < 1e-12 && (d.high.fpr - 0.2).abs() < 1e-12);
            assert!((d.low.tpr - d.high.tpr).abs() < 1e-12);
        }
    }

    #[test]
    fn rare_positives_make_the_constant_predictor_optimal() {
        // With a 2% base rate, 0.98·fpr outweighs 0.02·tpr at (0.2, 0.8).
        let r = rates((0.2, 0.8), (0.2, 0.8), (0.02, 0.02), 0.5);
        let (p, d) = fit_equalized_odds(&r).unwrap();
        assert_eq!((d.low.tpr, d.low.fpr), (0.0, 0.0));
        assert!((d.expected_loss - 0.02).abs() < 1e-15);
        assert!(expected_loss(&p, &r) <= expected_loss(&MixingParameters::IDENTITY, &r));
    }

    #[test]
    fn perfect_groups_stay_perfect() {
        let r = rates((0.0, 1.0), (0.0, 1.0), (0.3, 0.1), 0.4);
        let (p, d) = fit_equalized_odds(&r).unwrap();
        assert_eq!(p, MixingParameters::IDENTITY);
        assert_eq!(d.expected_loss, 0.0);
    }

    #[test]
    fn degenerate_group_on_the_diagonal() {
        let r = rates((0.4, 0.4), (0.1, 0.9), (0.5, 0.5), 0.5);
        let (_, d) = fit_equalized_odds(&r).unwrap();
        assert!((d.low.tpr - d.high.tpr).abs() < 1e-9);
        assert!((d.low.fpr - d.high.fpr).abs() < 1e-9);
        assert!((d.low.tpr - d.low.fpr).abs() < 1e-9);
    }

    #[test]
    fn invalid_rates_rejected() {
        assert!(fit_equalized_odds(&rates((0.2, 1.2), (0.2, 0.8), (0.5, 0.5), 0.5)).is_err());
        let mut r = rates((0.2, 0.8), (0.2, 0.8), (0.5, 0.5), 0.5);
        r.high.mass = 0.9;
        assert!(fit_equalized_odds(&r).is_err());
    }

    #[test]
    fn expected_loss_identities() {
        let perfect = rates((0.0, 1.0), (0.0, 1.0), (0.3, 0.6), 0.5);
        assert_eq!(expected_loss(&MixingParameters::IDENTITY, &perfect), 0.0);
        let half = MixingParameters {
            p00: 0.5,
            p01: 0.5,
            p10: 0.5,
            p11: 0.5,
        };
        let r = rates((0.13, 0.7), (0.4, 0.55), (0.2, 0.05), 0.35);
        assert!((expected_loss(&half, &r) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mixing_modes() {
        let preds = [true, false, true, false];
        let groups = [Group::Low, Group::Low, Group::High, Group::High];
        let id = MixingParameters::IDENTITY;
        assert_eq!(
            apply_mixing(&preds, &groups, &id, MixingMode::Expectation),
            [1.0, 0.0, 1.0, 0.0]
        );
        assert_eq!(
            apply_mixing(&preds, &groups, &id, MixingMode::Sampled { seed: 4 }),
            [1.0, 0.0, 1.0, 0.0]
        );

        let all_low = MixingParameters {
            p00: 1.0,
            p01: 0.0,
            p10: 1.0,
            p11: 1.0,
        };
        let out = sample_mixing(&preds, &groups, &all_low, 9);
        assert!(out[0] && out[1]);

        let half = MixingParameters {
            p00: 0.5,
            p01: 0.5,
            p10: 0.5,
            p11: 0.5,
        };
        assert!(mixing_scores(&preds, &groups, &half)
            .iter()
            .all(|&s| s == 0.5));
    }
}
