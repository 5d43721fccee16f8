//! Confusion matrices, accuracy and the skew-adjusted false-positive share.
//!
//! The threat class is the positive class: a false positive is a non-threat
//! sample classified as threat, a false negative the reverse.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Variable;
use crate::labeling::Label;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("confusion matrix is empty")]
    Empty,
    #[error("confusion matrix has no {0} samples")]
    EmptyClass(&'static str),
    #[error("cannot pool matrices with different threat classes")]
    MixedThreatClass,
    #[error("nothing to pool")]
    NothingToPool,
    #[error("{actual} actual labels but {predicted} predictions")]
    Length { actual: usize, predicted: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
    pub threat_class: Label,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64, threat_class: Label) -> Self {
        ConfusionMatrix {
            tp,
            fp,
            fn_,
            tn,
            threat_class,
        }
    }

    pub fn zero(threat_class: Label) -> Self {
        Self::new(0, 0, 0, 0, threat_class)
    }

    /// Tallies `(actual is threat, predicted threat)` pairs.
    pub fn from_predictions(
        actual: &[bool],
        predicted: &[bool],
        threat_class: Label,
    ) -> Result<Self, MetricsError> {
        if actual.len() != predicted.len() {
            return Err(MetricsError::Length {
                actual: actual.len(),
                predicted: predicted.len(),
            });
        }
        let mut cm = Self::zero(threat_class);
        for (&a, &p) in actual.iter().zip(predicted) {
            match (a, p) {
                (true, true) => cm.tp += 1,
                (false, true) => cm.fp += 1,
                (true, false) => cm.fn_ += 1,
                (false, false) => cm.tn += 1,
            }
        }
        Ok(cm)
    }

    pub fn n_threat(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn n_nonthreat(&self) -> u64 {
        self.tn + self.fp
    }

    pub fn total(&self) -> u64 {
        self.n_threat() + self.n_nonthreat()
    }

    pub fn accuracy(&self) -> Result<f64, MetricsError> {
        if self.total() == 0 {
            return Err(MetricsError::Empty);
        }
        Ok((self.tp + self.tn) as f64 / self.total() as f64)
    }

    /// `FPR / (FPR + FNR)`: the false-positive share of errors once both
    /// classes are weighted equally. `None` when the matrix has no errors.
    pub fn fp_rate_skew_adjusted(&self) -> Result<Option<f64>, MetricsError> {
        if self.n_threat() == 0 {
            return Err(MetricsError::EmptyClass("threat"));
        }
        if self.n_nonthreat() == 0 {
            return Err(MetricsError::EmptyClass("non-threat"));
        }
        let fpr = self.fp as f64 / self.n_nonthreat() as f64;
        let fnr = self.fn_ as f64 / self.n_threat() as f64;
        let total = fpr + fnr;
        Ok((total > 0.0).then(|| fpr / total))
    }
}

/// Elementwise sum of matrices sharing a threat class.
pub fn pool(matrices: &[ConfusionMatrix]) -> Result<ConfusionMatrix, MetricsError> {
    let first = matrices.first().ok_or(MetricsError::NothingToPool)?;
    let mut out = ConfusionMatrix::zero(first.threat_class);
    for m in matrices {
        if m.threat_class != first.threat_class {
            return Err(MetricsError::MixedThreatClass);
        }
        out.tp += m.tp;
        out.fp += m.fp;
        out.fn_ += m.fn_;
        out.tn += m.tn;
    }
    Ok(out)
}

/// Outcome of one (language, variable, fold) train/evaluate cycle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub language: String,
    pub variable: Variable,
    pub fold: usize,
    pub seed: u64,
    pub matrix: ConfusionMatrix,
    pub accuracy: f64,
    pub fp_pct: Option<f64>,
}

impl IterationRecord {
    pub fn new(
        language: impl Into<String>,
        variable: Variable,
        fold: usize,
        seed: u64,
        matrix: ConfusionMatrix,
    ) -> Result<Self, MetricsError> {
        Ok(IterationRecord {
            language: language.into(),
            variable,
            fold,
            seed,
            accuracy: matrix.accuracy()?,
            fp_pct: matrix.fp_rate_skew_adjusted()?,
            matrix,
        })
    }
}
