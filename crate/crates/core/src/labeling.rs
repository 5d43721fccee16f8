//! Median-split labels, class balancing and stratified fold assignment.
//!
//! The stages always run in the order `median_split -> balance -> make_folds`,
//! and each one is a pure function of its inputs and seed.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{FeatureVector, Variable};

#[derive(Debug, Error, PartialEq)]
pub enum LabelError {
    #[error("median split needs at least one value")]
    EmptyInput,
    #[error("value for {id:?} is not finite")]
    NonFinite { id: String },
    #[error("class {0} has no samples")]
    EmptyClass(Label),
    #[error("fold count must be at least 2, got {0}")]
    TooFewFolds(usize),
    #[error("class {label} has {size} samples, fewer than k = {k}")]
    ClassSmallerThanK { label: Label, size: usize, k: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Low,
    High,
}

impl Label {
    pub fn other(self) -> Label {
        match self {
            Label::Low => Label::High,
            Label::High => Label::Low,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Low => "low",
            Label::High => "high",
        })
    }
}

/// Outcome of the median split for one sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitClass {
    Low,
    High,
    Omitted,
}

impl SplitClass {
    pub fn label(self) -> Option<Label> {
        match self {
            SplitClass::Low => Some(Label::Low),
            SplitClass::High => Some(Label::High),
            SplitClass::Omitted => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MedianSplit {
    pub median: f64,
    /// Input order is preserved.
    pub classes: Vec<(String, SplitClass)>,
}

impl MedianSplit {
    pub fn get(&self, id: &str) -> Option<SplitClass> {
        self.classes.iter().find(|(i, _)| i == id).map(|(_, c)| *c)
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Some(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    })
}

/// Labels values below the median `low`, above it `high`, and drops ties.
pub fn median_split(values: &[(String, f64)]) -> Result<MedianSplit, LabelError> {
    if let Some((id, _)) = values.iter().find(|(_, v)| !v.is_finite()) {
        return Err(LabelError::NonFinite { id: id.clone() });
    }
    let raw: Vec<f64> = values.iter().map(|(_, v)| *v).collect();
    let median = median(&raw).ok_or(LabelError::EmptyInput)?;
    let classes = values
        .iter()
        .map(|(id, v)| {
            let class = if *v < median {
                SplitClass::Low
            } else if *v > median {
                SplitClass::High
            } else {
                SplitClass::Omitted
            };
            (id.clone(), class)
        })
        .collect();
    Ok(MedianSplit { median, classes })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub id: String,
    pub features: FeatureVector,
    pub label: Label,
}

/// Binary classification data for one (language, variable) pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryLabeledSet {
    pub variable: Variable,
    pub language: String,
    pub samples: Vec<LabeledSample>,
    pub threat_class: Label,
    pub seed: u64,
}

impl BinaryLabeledSet {
    pub fn count(&self, label: Label) -> usize {
        self.samples.iter().filter(|s| s.label == label).count()
    }

    pub fn is_balanced(&self) -> bool {
        self.count(Label::Low) == self.count(Label::High)
    }
}

/// Down-samples the majority class to the minority size, keeping order.
pub fn balance(set: &BinaryLabeledSet, seed: u64) -> Result<BinaryLabeledSet, LabelError> {
    let low = set.count(Label::Low);
    let high = set.count(Label::High);
    for (label, n) in [(Label::Low, low), (Label::High, high)] {
        if n == 0 {
            return Err(LabelError::EmptyClass(label));
        }
    }
    let mut out = set.clone();
    out.seed = seed;
    if low == high {
        return Ok(out);
    }
    let (majority, keep) = if low > high {
        (Label::Low, high)
    } else {
        (Label::High, low)
    };
    let majority_idx: Vec<usize> = set
        .samples
        .iter()
        .enumerate()
        .filter(|(_, s)| s.label == majority)
        .map(|(i, _)| i)
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut retained = vec![false; majority_idx.len()];
    for j in index::sample(&mut rng, majority_idx.len(), keep) {
        retained[j] = true;
    }
    let mut dropped = vec![false; set.samples.len()];
    for (j, &i) in majority_idx.iter().enumerate() {
        dropped[i] = !retained[j];
    }
    out.samples = set
        .samples
        .iter()
        .zip(dropped)
        .filter(|(_, d)| !d)
        .map(|(s, _)| s.clone())
        .collect();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub assignment: BTreeMap<String, usize>,
}

impl FoldAssignment {
    /// Fold index of each sample, in the set's sample order.
    pub fn folds_for(&self, set: &BinaryLabeledSet) -> Vec<usize> {
        set.samples.iter().map(|s| self.assignment[&s.id]).collect()
    }

    /// Test ids of each fold, sorted.
    pub fn test_ids(&self) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new(); self.k];
        for (id, &f) in &self.assignment {
            out[f].push(id.clone());
        }
        out
    }
}

/// Stratified round-robin fold assignment over a seeded per-class shuffle.
///
/// Classes are dealt in label order (`low` first) and the round-robin
/// counter carries over between classes, so total fold sizes also differ
/// by at most one.
pub fn make_folds(
    set: &BinaryLabeledSet,
    k: usize,
    seed: u64,
) -> Result<FoldAssignment, LabelError> {
    if k < 2 {
        return Err(LabelError::TooFewFolds(k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = BTreeMap::new();
    let mut next = 0usize;
    for label in [Label::Low, Label::High] {
        let mut members: Vec<&LabeledSample> =
            set.samples.iter().filter(|s| s.label == label).collect();
        if members.len() < k {
            return Err(LabelError::ClassSmallerThanK {
                label,
                size: members.len(),
                k,
            });
        }
        members.shuffle(&mut rng);
        for s in members {
            assignment.insert(s.id.clone(), next % k);
            next += 1;
        }
    }
    Ok(FoldAssignment { k, assignment })
}

/// Derives an independent sub-seed from a master seed and a path of labels.
///
/// The sub-seed is the first eight bytes (little-endian) of
/// `SHA-256(master_le_bytes || part_0 || 0x1f || part_1 || 0x1f ...)`, so
/// adding a new (language, variable) pair never perturbs existing ones.
pub fn derive_seed(master: u64, parts: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    for p in parts {
        hasher.update(p.as_bytes());
        hasher.update([0x1f]);
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
