//! Fairness-without-harm evaluation engine.
//!
//! Consumes per-sample prediction logs (or published per-group summaries),
//! computes group utility and fairness metrics, selects a baseline by
//! distance to the utopia point, classifies mitigation candidates into
//! zones relative to that baseline, and compares methods across datasets
//! with the Friedman test and the Nemenyi critical difference.

pub mod cli;
pub mod config;
pub mod metrics;
pub mod records;
pub mod report;
pub mod selection;
pub mod stats;
pub mod synth;

pub use metrics::{GroupUtilityVector, MetricReport};
pub use records::{EvaluationRun, RunManifest, RunSummary};
pub use selection::{CandidatePoint, SelectionResult, ZoneLabel};
