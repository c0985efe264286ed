//! Corpus ingestion, synthetic data, the trial loop and reports.

pub mod corpus;
pub mod experiment;
pub mod report;
pub mod synthetic;

pub use corpus::{format_messages, load_messages, parse_messages, write_messages, MessageRecord};
pub use experiment::{
    extract_instance, run_trial, trial_seed, CorpusSource, ExperimentConfig, MedianScope,
    PreparedCorpus, TrialFailure, TrialRecord,
};
pub use report::{run_experiment, run_prepared, AuditReport, CorpusSummary};
pub use synthetic::{generate_synthetic, recipient_centrality, SyntheticConfig};
