//! Gradient-boosted regression trees for binary logistic classification.
//!
//! Trees are grown with exact greedy split search over the distinct values
//! of each feature, using the regularised second-order gain. Leaf weights
//! are stored already scaled by the learning rate, so a model's margin is
//! `base_margin + sum(tree outputs)`.

mod objective;
mod train;
mod tune;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::FeatureVector;
use crate::exec::Execution;

pub use objective::{grad_hess, leaf_weight, logistic_loss, logit, sigmoid, split_gain};
pub use train::{train, train_logged, train_with, LeafLog, SplitLog, TrainingLog};
pub use tune::{tune, TuningGrid};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum BoostError {
    #[error("probability {0} is outside (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("leaf has zero curvature (hessian + lambda = 0)")]
    ZeroCurvature,
    #[error("invalid parameter {name}: {message}")]
    InvalidParam { name: &'static str, message: String },
    #[error("training data is empty")]
    EmptyData,
    #[error("{rows} rows but {labels} labels")]
    LabelCount { rows: usize, labels: usize },
    #[error("expected {expected} features, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("feature matrix contains a non-finite value at row {row}, feature {feature}")]
    NonFinite { row: usize, feature: usize },
    #[error("model json: {0}")]
    Json(String),
    #[error("unsupported model format version {0}")]
    Version(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostParams {
    pub rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub l2_lambda: f64,
    pub min_split_gain: f64,
    pub min_child_weight: f64,
    pub row_subsample: f64,
    pub col_subsample_per_node: f64,
    pub base_score: f64,
    pub seed: u64,
}

impl Default for BoostParams {
    fn default() -> Self {
        BoostParams {
            rounds: 200,
            learning_rate: 0.1,
            max_depth: 4,
            l2_lambda: 1.0,
            min_split_gain: 0.0,
            min_child_weight: 1.0,
            row_subsample: 0.8,
            col_subsample_per_node: 0.8,
            base_score: 0.5,
            seed: 0,
        }
    }
}

impl BoostParams {
    pub fn validate(&self) -> Result<(), BoostError> {
        fn bad(name: &'static str, message: String) -> Result<(), BoostError> {
            Err(BoostError::InvalidParam { name, message })
        }
        let unit = |v: f64| v > 0.0 && v <= 1.0;
        if self.rounds == 0 {
            return bad("rounds", "must be positive".into());
        }
        if !unit(self.learning_rate) {
            return bad(
                "learning_rate",
                format!("{} not in (0, 1]", self.learning_rate),
            );
        }
        if self.max_depth == 0 {
            return bad("max_depth", "must be positive".into());
        }
        for (name, v) in [
            ("l2_lambda", self.l2_lambda),
            ("min_split_gain", self.min_split_gain),
            ("min_child_weight", self.min_child_weight),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(name, format!("{v} must be finite and >= 0"));
            }
        }
        if !unit(self.row_subsample) {
            return bad(
                "row_subsample",
                format!("{} not in (0, 1]", self.row_subsample),
            );
        }
        if !unit(self.col_subsample_per_node) {
            return bad(
                "col_subsample_per_node",
                format!("{} not in (0, 1]", self.col_subsample_per_node),
            );
        }
        if !(self.base_score > 0.0 && self.base_score < 1.0) {
            return bad("base_score", format!("{} not in (0, 1)", self.base_score));
        }
        Ok(())
    }

    /// Same parameters with both subsampling rates set to 1.
    pub fn without_subsampling(mut self) -> Self {
        self.row_subsample = 1.0;
        self.col_subsample_per_node = 1.0;
        self
    }
}

/// Dense row-major feature matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    n_rows: usize,
    n_features: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, BoostError> {
        let n_features = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * n_features);
        for row in rows {
            if row.len() != n_features {
                return Err(BoostError::Dimension {
                    expected: n_features,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(FeatureMatrix {
            n_rows: rows.len(),
            n_features,
            data,
        })
    }

    pub fn from_counts<'a>(
        rows: impl IntoIterator<Item = &'a FeatureVector>,
    ) -> Result<Self, BoostError> {
        let rows: Vec<Vec<f64>> = rows
            .into_iter()
            .map(|fv| fv.counts.iter().map(|&c| f64::from(c)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn get(&self, row: usize, feature: usize) -> f64 {
        self.data[row * self.n_features + feature]
    }

    /// Rows `indices` in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.n_features);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            n_rows: indices.len(),
            n_features: self.n_features,
            data,
        }
    }

    /// Copy with an extra all-zero feature appended.
    pub fn with_zero_column(&self) -> FeatureMatrix {
        let rows: Vec<Vec<f64>> = (0..self.n_rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(0.0);
                r
            })
            .collect();
        FeatureMatrix::from_rows(&rows).expect("rows share a width")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TreeNode {
    /// `x[feature] < threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        gain: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        weight: f64,
    },
}

impl TreeNode {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { weight } => return *weight,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    node = if x[*feature] < *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn visit_splits(&self, f: &mut impl FnMut(usize, f64, f64)) {
        if let TreeNode::Split {
            feature,
            threshold,
            gain,
            left,
            right,
        } = self
        {
            f(*feature, *threshold, *gain);
            left.visit_splits(f);
            right.visit_splits(f);
        }
    }

    pub fn leaves(&self) -> Vec<f64> {
        match self {
            TreeNode::Leaf { weight } => vec![*weight],
            TreeNode::Split { left, right, .. } => {
                let mut v = left.leaves();
                v.extend(right.leaves());
                v
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostModel {
    pub format_version: u32,
    pub params: BoostParams,
    pub n_features: usize,
    pub base_margin: f64,
    pub trees: Vec<TreeNode>,
}

impl BoostModel {
    /// A model with no trees: predicts `base_score` everywhere.
    pub fn empty(params: BoostParams, n_features: usize) -> Self {
        BoostModel {
            format_version: MODEL_FORMAT_VERSION,
            base_margin: logit(params.base_score),
            params,
            n_features,
            trees: Vec::new(),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), BoostError> {
        if x.len() != self.n_features {
            return Err(BoostError::Dimension {
                expected: self.n_features,
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn predict_margin(&self, x: &[f64]) -> Result<f64, BoostError> {
        self.check_dim(x)?;
        Ok(self.margin_unchecked(x))
    }

    fn margin_unchecked(&self, x: &[f64]) -> f64 {
        self.trees
            .iter()
            .fold(self.base_margin, |m, t| m + t.predict(x))
    }

    pub fn predict_prob(&self, x: &[f64]) -> Result<f64, BoostError> {
        self.predict_margin(x).map(sigmoid)
    }

    /// True when the sample is assigned to the positive (threat) class.
    /// A probability of exactly 0.5 counts as positive.
    pub fn classify(&self, x: &[f64]) -> Result<bool, BoostError> {
        self.predict_prob(x).map(|p| p >= 0.5)
    }

    pub fn classify_counts(&self, fv: &FeatureVector) -> Result<bool, BoostError> {
        let x: Vec<f64> = fv.counts.iter().map(|&c| f64::from(c)).collect();
        self.classify(&x)
    }

    /// Margins of every row, in row order.
    pub fn predict_margins(
        &self,
        x: &FeatureMatrix,
        exec: Execution,
    ) -> Result<Vec<f64>, BoostError> {
        if x.n_features() != self.n_features {
            return Err(BoostError::Dimension {
                expected: self.n_features,
                found: x.n_features(),
            });
        }
        let rows: Vec<usize> = (0..x.n_rows()).collect();
        Ok(exec.map(&rows, |&i| self.margin_unchecked(x.row(i))))
    }

    /// Total realised split gain per feature, indexed by feature.
    pub fn feature_importance(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_features];
        for tree in &self.trees {
            tree.visit_splits(&mut |feature, _, gain| out[feature] += gain);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialises")
    }

    pub fn from_json(s: &str) -> Result<Self, BoostError> {
        let model: BoostModel =
            serde_json::from_str(s).map_err(|e| BoostError::Json(e.to_string()))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(BoostError::Version(model.format_version));
        }
        Ok(model)
    }
}
