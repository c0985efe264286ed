//! ROC AUC, Student/Welch t-tests and multi-trial aggregation.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Area under the ROC curve in its Mann–Whitney form: the fraction of
/// (positive, negative) pairs ranked correctly, ties counting one half.
pub fn auc_roc(labels: &[bool], scores: &[f64]) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(Error::Mismatch(format!(
            "{} labels but {} scores",
            labels.len(),
            scores.len()
        )));
    }
    let positives = labels.iter().filter(|&&y| y).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass);
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidParameter("NaN score".into()));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap_or(Ordering::Equal));

    // Sum of average (1-based) ranks of the positives, twice over to stay in
    // integers: a tie block spanning ranks lo+1..=hi has doubled rank lo+hi+1.
    let mut doubled_rank_sum: u128 = 0;
    let mut lo = 0;
    while lo < order.len() {
        let mut hi = lo + 1;
        while hi < order.len() && scores[order[hi]] == scores[order[lo]] {
            hi += 1;
        }
        let pos_in_block = order[lo..hi].iter().filter(|&&i| labels[i]).count() as u128;
        doubled_rank_sum += pos_in_block * (lo + hi + 1) as u128;
        lo = hi;
    }
    let (p, n) = (positives as u128, negatives as u128);
    // doubled U statistic = 2 R - p (p + 1)
    let doubled_u = doubled_rank_sum - p * (p + 1);
    Ok(doubled_u as f64 / (2 * p * n) as f64)
}

/// Natural log of the gamma function (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    #[allow(clippy::excessive_precision)]
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut sum = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`.
///
/// `one_minus_x` is passed separately so callers can supply `1 - x` without
/// cancellation.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64, one_minus_x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if one_minus_x <= 0.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * one_minus_x.ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, one_minus_x) / b
    }
}

/// Upper tail `Pr{T > t}` of Student's t with `df` degrees of freedom.
pub fn student_t_upper_tail(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return if t > 0.0 { 0.0 } else { 1.0 };
    }
    let t2 = t * t;
    let x = df / (df + t2);
    let one_minus_x = t2 / (df + t2);
    let two_sided = regularized_incomplete_beta(df / 2.0, 0.5, x, one_minus_x);
    if t >= 0.0 {
        0.5 * two_sided
    } else {
        1.0 - 0.5 * two_sided
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sided {
    /// Alternative: mean of the first sample exceeds the second.
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    /// Infinite when both samples have zero variance but different means.
    #[serde(with = "signed_infinity")]
    pub t_statistic: f64,
    pub degrees_of_freedom: f64,
    pub p_value: f64,
    pub sided: Sided,
    pub alpha: f64,
    pub significant: bool,
}

impl SignificanceResult {
    fn new(t: f64, df: f64, sided: Sided) -> Self {
        let p_value = match sided {
            Sided::One => student_t_upper_tail(t, df),
            Sided::Two => (2.0 * student_t_upper_tail(t.abs(), df)).min(1.0),
        };
        SignificanceResult {
            t_statistic: t,
            degrees_of_freedom: df,
            p_value,
            sided,
            alpha: DEFAULT_ALPHA,
            significant: p_value < DEFAULT_ALPHA,
        }
    }

    pub fn at_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self.significant = self.p_value < alpha;
        self
    }
}

// JSON has no infinity; write it as the strings "inf" / "-inf".
mod signed_infinity {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else if *x < 0.0 {
            s.serialize_str("-inf")
        } else {
            s.serialize_str("nan")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(D::Error::custom(format!("invalid t statistic '{other}'"))),
            },
        }
    }
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

fn check_sizes(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "t-test needs at least 2 observations per sample (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("non-finite observation".into()));
    }
    Ok(())
}

/// Welch's unequal-variance t-test with Satterthwaite degrees of freedom.
pub fn welch_t_test(a: &[f64], b: &[f64], sided: Sided) -> Result<SignificanceResult> {
    check_sizes(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (qa, qb) = (va / na, vb / nb);
    let se2 = qa + qb;
    if se2 == 0.0 {
        if ma == mb {
            return Err(Error::DegenerateSamples(
                "both samples have zero variance and equal means".into(),
            ));
        }
        let t = if ma > mb {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        return Ok(SignificanceResult::new(t, na + nb - 2.0, sided));
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    Ok(SignificanceResult::new(t, df, sided))
}

/// Paired t-test on `a[i] - b[i]`.
pub fn paired_t_test(a: &[f64], b: &[f64], sided: Sided) -> Result<SignificanceResult> {
    if a.len() != b.len() {
        return Err(Error::Mismatch(format!(
            "paired samples differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    check_sizes(a, b)?;
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = diffs.len() as f64;
    let (m, v) = mean_var(&diffs);
    if v == 0.0 {
        if m == 0.0 {
            return Err(Error::DegenerateSamples(
                "all paired differences are zero".into(),
            ));
        }
        let t = if m > 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        return Ok(SignificanceResult::new(t, n - 1.0, sided));
    }
    Ok(SignificanceResult::new(m / (v / n).sqrt(), n - 1.0, sided))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Baseline,
    Debiased,
}

/// TPR, FPR and ROC AUC for one group (or all instances).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub tpr: f64,
    pub fpr: f64,
    pub auc: f64,
}

impl Metrics {
    fn minus(self, other: Metrics) -> Metrics {
        Metrics {
            tpr: self.tpr - other.tpr,
            fpr: self.fpr - other.fpr,
            auc: self.auc - other.auc,
        }
    }

    fn abs(self) -> Metrics {
        Metrics {
            tpr: self.tpr.abs(),
            fpr: self.fpr.abs(),
            auc: self.auc.abs(),
        }
    }

    fn mean(items: impl Iterator<Item = Metrics>) -> Metrics {
        let mut sum = Metrics::default();
        let mut n = 0usize;
        for m in items {
            sum.tpr += m.tpr;
            sum.fpr += m.fpr;
            sum.auc += m.auc;
            n += 1;
        }
        let n = n as f64;
        Metrics {
            tpr: sum.tpr / n,
            fpr: sum.fpr / n,
            auc: sum.auc / n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub seed: u64,
    pub condition: Condition,
    pub high: Metrics,
    pub low: Metrics,
    pub overall: Metrics,
}

impl TrialMetrics {
    /// High minus low, per metric.
    pub fn delta(&self) -> Metrics {
        self.high.minus(self.low)
    }
}

/// One of the per-condition tables: group means and their difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionTable {
    pub high: Metrics,
    pub low: Metrics,
    /// `high - low` of the means (signed).
    pub difference: Metrics,
    pub overall: Metrics,
}

/// Absolute group gaps before and after debiasing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaTable {
    pub baseline: Metrics,
    pub proposed: Metrics,
    /// `baseline - proposed`; positive means the gap shrank.
    pub change: Metrics,
}

/// One optional test per metric; `None` where the test is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricTests {
    pub tpr: Option<SignificanceResult>,
    pub fpr: Option<SignificanceResult>,
    pub auc: Option<SignificanceResult>,
}

impl MetricTests {
    fn build(
        a: &[Metrics],
        b: &[Metrics],
        alpha: f64,
        test: impl Fn(&[f64], &[f64]) -> Result<SignificanceResult>,
    ) -> Self {
        let run = |get: fn(&Metrics) -> f64| {
            let xa: Vec<f64> = a.iter().map(get).collect();
            let xb: Vec<f64> = b.iter().map(get).collect();
            test(&xa, &xb).ok().map(|r| r.at_alpha(alpha))
        };
        MetricTests {
            tpr: run(|m| m.tpr),
            fpr: run(|m| m.fpr),
            auc: run(|m| m.auc),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub baseline: ConditionTable,
    pub debiased: ConditionTable,
    pub deltas: DeltaTable,
    /// Per-trial signed `high - low`, in baseline trial order.
    pub baseline_trial_deltas: Vec<Metrics>,
    pub debiased_trial_deltas: Vec<Metrics>,
    /// Mean over trials of `|high - low|`.
    pub baseline_mean_abs_delta: Metrics,
    pub debiased_mean_abs_delta: Metrics,
    /// Welch, one-sided: high group above low group.
    pub group_tests_baseline: MetricTests,
    pub group_tests_debiased: MetricTests,
    /// Paired over shared seeds, one-sided: baseline `|delta|` above debiased.
    pub method_tests_paired: MetricTests,
    /// Unpaired Welch counterpart of `method_tests_paired`.
    pub method_tests_welch: MetricTests,
    /// Paired, two-sided: overall AUC baseline vs debiased.
    pub overall_auc_test: Option<SignificanceResult>,
}

fn table(trials: &[&TrialMetrics]) -> ConditionTable {
    let high = Metrics::mean(trials.iter().map(|t| t.high));
    let low = Metrics::mean(trials.iter().map(|t| t.low));
    ConditionTable {
        high,
        low,
        difference: high.minus(low),
        overall: Metrics::mean(trials.iter().map(|t| t.overall)),
    }
}

pub fn aggregate_trials(trials: &[TrialMetrics], alpha: f64) -> Result<Aggregate> {
    let baseline: Vec<&TrialMetrics> = trials
        .iter()
        .filter(|t| t.condition == Condition::Baseline)
        .collect();
    let by_seed: HashMap<u64, &TrialMetrics> = trials
        .iter()
        .filter(|t| t.condition == Condition::Debiased)
        .map(|t| (t.seed, t))
        .collect();
    if baseline.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "aggregation needs at least 2 trials per condition (got {})",
            baseline.len()
        )));
    }
    if by_seed.len() != baseline.len() || trials.len() != 2 * baseline.len() {
        return Err(Error::Mismatch(
            "baseline and debiased trials do not pair up one-to-one by seed".into(),
        ));
    }
    let debiased = baseline
        .iter()
        .map(|b| {
            by_seed
                .get(&b.seed)
                .copied()
                .ok_or_else(|| Error::Mismatch(format!("seed {} has no debiased trial", b.seed)))
        })
        .collect::<Result<Vec<_>>>()?;

    let base_table = table(&baseline);
    let debiased_table = table(&debiased);
    let deltas = DeltaTable {
        baseline: base_table.difference.abs(),
        proposed: debiased_table.difference.abs(),
        change: base_table
            .difference
            .abs()
            .minus(debiased_table.difference.abs()),
    };

    let base_deltas: Vec<Metrics> = baseline.iter().map(|t| t.delta()).collect();
    let deb_deltas: Vec<Metrics> = debiased.iter().map(|t| t.delta()).collect();
    let base_abs: Vec<Metrics> = base_deltas.iter().map(|m| m.abs()).collect();
    let deb_abs: Vec<Metrics> = deb_deltas.iter().map(|m| m.abs()).collect();

    let highs = |ts: &[&TrialMetrics]| ts.iter().map(|t| t.high).collect::<Vec<_>>();
    let lows = |ts: &[&TrialMetrics]| ts.iter().map(|t| t.low).collect::<Vec<_>>();
    let welch_one = |a: &[f64], b: &[f64]| welch_t_test(a, b, Sided::One);
    let paired_one = |a: &[f64], b: &[f64]| paired_t_test(a, b, Sided::One);

    let base_auc: Vec<f64> = baseline.iter().map(|t| t.overall.auc).collect();
    let deb_auc: Vec<f64> = debiased.iter().map(|t| t.overall.auc).collect();

    Ok(Aggregate {
        trials: baseline.len(),
        baseline: base_table,
        debiased: debiased_table,
        deltas,
        baseline_mean_abs_delta: Metrics::mean(base_abs.iter().copied()),
        debiased_mean_abs_delta: Metrics::mean(deb_abs.iter().copied()),
        group_tests_baseline: MetricTests::build(
            &highs(&baseline),
            &lows(&baseline),
            alpha,
            welch_one,
        ),
        group_tests_debiased: MetricTests::build(
            &highs(&debiased),
            &lows(&debiased),
            alpha,
            welch_one,
        ),
        method_tests_paired: MetricTests::build(&base_abs, &deb_abs, alpha, paired_one),
        method_tests_welch: MetricTests::build(&base_abs, &deb_abs, alpha, welch_one),
        overall_auc_test: paired_t_test(&base_auc, &deb_auc, Sided::Two)
            .ok()
            .map(|r| r.at_alpha(alpha)),
        baseline_trial_deltas: base_deltas,
        debiased_trial_deltas: deb_deltas,
    })
}
