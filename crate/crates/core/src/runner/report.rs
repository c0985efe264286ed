//! Audit reports: a JSON document with every trial, and aligned text tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::experiment::{
    aggregate_records, check_failures, run_trials, ExperimentConfig, PreparedCorpus, TrialFailure,
    TrialRecord,
};
use crate::error::{Error, Result};
use crate::features::{FEATURE_DIM, FEATURE_NAMES};
use crate::stats::{Aggregate, MetricTests, Metrics, SignificanceResult};

pub const STRUCTURED_FILE: &str = "report.json";
pub const HUMAN_FILE: &str = "report.txt";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub messages: usize,
    pub positives: usize,
    pub nodes: usize,
    pub edges: usize,
    pub self_loops_dropped: usize,
    pub feature_extractions: usize,
    pub feature_names: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverallAuc {
    pub baseline: f64,
    pub debiased: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub config: ExperimentConfig,
    pub corpus: CorpusSummary,
    pub trials: Vec<TrialRecord>,
    pub failures: Vec<TrialFailure>,
    pub aggregate: Aggregate,
    pub overall_auc: OverallAuc,
}

impl CorpusSummary {
    pub fn of(corpus: &PreparedCorpus) -> Self {
        CorpusSummary {
            messages: corpus.data.len(),
            positives: corpus.data.positives(),
            nodes: corpus.graph.node_count(),
            edges: corpus.graph.edge_count(),
            self_loops_dropped: corpus.graph.self_loops_dropped(),
            feature_extractions: corpus.extractions,
            feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Runs every trial on an already prepared corpus.
pub fn run_prepared(
    corpus: &PreparedCorpus,
    cfg: &ExperimentConfig,
    parallel: bool,
) -> Result<AuditReport> {
    cfg.validate()?;
    let (trials, failures) = run_trials(corpus, cfg, parallel);
    check_failures(failures.len(), cfg.trials)?;
    let aggregate = aggregate_records(&trials, cfg.alpha)?;
    let overall_auc = OverallAuc {
        baseline: aggregate.baseline.overall.auc,
        debiased: aggregate.debiased.overall.auc,
    };
    Ok(AuditReport {
        config: cfg.clone(),
        corpus: CorpusSummary::of(corpus),
        trials,
        failures,
        aggregate,
        overall_auc,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig, parallel: bool) -> Result<AuditReport> {
    cfg.validate()?;
    let corpus = PreparedCorpus::load(cfg)?;
    run_prepared(&corpus, cfg, parallel)
}

impl AuditReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_text(&self) -> String {
        render_text(self)
    }

    /// Writes both forms into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let json = dir.join(STRUCTURED_FILE);
        let text = dir.join(HUMAN_FILE);
        fs::write(&json, self.to_json()?).map_err(|e| Error::io(&json, e))?;
        fs::write(&text, self.to_text()).map_err(|e| Error::io(&text, e))?;
        Ok((json, text))
    }
}

const LABEL_WIDTH: usize = 16;

fn header(out: &mut String, title: &str) {
    let _ = writeln!(out, "{title}");
    let _ = writeln!(
        out,
        "{:<LABEL_WIDTH$}{:>10}{:>10}{:>10}",
        "", "TPR", "FPR", "ROC AUC"
    );
}

fn row(out: &mut String, label: &str, m: &Metrics) {
    let _ = writeln!(
        out,
        "{label:<LABEL_WIDTH$}{:>10.4}{:>10.4}{:>10.4}",
        m.tpr, m.fpr, m.auc
    );
}

fn verdict(r: &Option<SignificanceResult>, alpha: f64) -> String {
    match r {
        Some(r) => format!(
            "t={:.4} df={:.2} p={:.4e}; significant at alpha={alpha}: {}",
            r.t_statistic,
            r.degrees_of_freedom,
            r.p_value,
            if r.significant { "yes" } else { "no" }
        ),
        None => format!("undefined; significant at alpha={alpha}: n/a"),
    }
}

fn test_lines(out: &mut String, tests: &MetricTests, alpha: f64) {
    for (name, r) in [
        ("TPR", &tests.tpr),
        ("FPR", &tests.fpr),
        ("ROC AUC", &tests.auc),
    ] {
        let _ = writeln!(out, "  {name}: {}", verdict(r, alpha));
    }
}

fn render_text(report: &AuditReport) -> String {
    let agg = &report.aggregate;
    let alpha = report.config.alpha;
    let mut out = String::new();
    let c = &report.corpus;
    let _ = writeln!(
        out,
        "Corpus: {} messages ({} bullying), {} users, {} edges, {} features",
        c.messages, c.positives, c.nodes, c.edges, FEATURE_DIM
    );
    let _ = writeln!(
        out,
        "Trials: {} completed, {} failed (master seed {})",
        report.trials.len(),
        report.failures.len(),
        report.config.master_seed
    );
    out.push('\n');

    for (title, table, tests) in [
        ("Baseline", &agg.baseline, &agg.group_tests_baseline),
        ("Proposed Method", &agg.debiased, &agg.group_tests_debiased),
    ] {
        header(&mut out, title);
        row(&mut out, "High", &table.high);
        row(&mut out, "Low", &table.low);
        row(&mut out, "Difference", &table.difference);
        let _ = writeln!(out, "Welch t-test, high > low:");
        test_lines(&mut out, tests, alpha);
        out.push('\n');
    }

    header(&mut out, "Deltas across high/low centrality groups");
    row(&mut out, "Baseline Delta", &agg.deltas.baseline);
    row(&mut out, "Proposed Delta", &agg.deltas.proposed);
    row(&mut out, "Change", &agg.deltas.change);
    let _ = writeln!(
        out,
        "Paired t-test on per-trial |high - low|, baseline > proposed:"
    );
    test_lines(&mut out, &agg.method_tests_paired, alpha);
    out.push('\n');

    let _ = writeln!(
        out,
        "Overall ROC AUC: {:.4} -> {:.4}",
        report.overall_auc.baseline, report.overall_auc.debiased
    );
    let _ = writeln!(
        out,
        "  paired, two-sided: {}",
        verdict(&agg.overall_auc_test, alpha)
    );
    for f in &report.failures {
        let _ = writeln!(
            out,
            "Trial {} (seed {}) failed: {}",
            f.index, f.seed, f.error
        );
    }
    out
}
