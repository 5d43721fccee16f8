//! Phoneme-count classifiers for name corpora and the false-positive skew
//! analysis built on top of them.
//!
//! The pipeline is: load a corpus of transcribed names ([`corpus`]), split a
//! continuous attribute at its median and balance the classes
//! ([`labeling`]), train cross-validated gradient-boosted trees ([`boost`]),
//! score each held-out fold ([`metrics`]) and run the hypothesis tests and
//! name-length regressions over the per-fold results ([`stats`],
//! [`runner`]).
//!
//! Data-parallel loops (split search, fold evaluation) go through [`exec`],
//! which uses rayon when the `parallel` feature is enabled and a plain
//! sequential loop otherwise. Results are bit-identical either way.

pub mod boost;
pub mod corpus;
pub mod exec;
pub mod labeling;
pub mod metrics;
pub mod runner;
pub mod stats;

pub use boost::{BoostModel, BoostParams, FeatureMatrix};
pub use corpus::{Corpus, FeatureVector, NameEntry, TokenInventory, Variable};
pub use exec::Execution;
pub use labeling::{BinaryLabeledSet, FoldAssignment, Label};
pub use metrics::{ConfusionMatrix, IterationRecord};
pub use runner::{ExperimentConfig, ExperimentReport};
