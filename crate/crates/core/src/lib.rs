//! Fairness auditing of socio-textual abuse detectors across network positions.
//!
//! The pipeline builds a directed interaction graph from a message corpus,
//! describes every message by social features of the sender/receiver
//! relationship graph plus textual features, trains a dagging ensemble on a
//! SMOTE-balanced training split, audits TPR/FPR/AUC across recipients with
//! low and high out-degree centrality, and removes the gap with an
//! equalized-odds derived predictor.

pub mod error;
pub mod fairness;
pub mod features;
pub mod graph;
pub mod model;
pub mod runner;
pub mod sampling;
pub mod stats;

pub use error::{Error, Result};
