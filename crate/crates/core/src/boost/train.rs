use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::objective::{grad_hess, leaf_weight, logistic_loss, sigmoid, split_gain};
use super::{BoostError, BoostModel, BoostParams, FeatureMatrix, TreeNode};
use crate::exec::Execution;

// Keeps grad_hess inside its domain once a margin saturates the sigmoid.
const PROB_CLAMP: f64 = f64::EPSILON;

#[derive(Clone, Debug, PartialEq)]
pub struct SplitLog {
    pub round: usize,
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeafLog {
    pub round: usize,
    pub grad_sum: f64,
    pub hess_sum: f64,
    pub weight: f64,
}

/// Side record of a training run, for checking training-time invariants.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingLog {
    /// Training logistic loss (summed) after 0, 1, ..., rounds trees.
    pub loss: Vec<f64>,
    pub splits: Vec<SplitLog>,
    pub leaves: Vec<LeafLog>,
}

pub fn train(
    x: &FeatureMatrix,
    y: &[bool],
    params: &BoostParams,
) -> Result<BoostModel, BoostError> {
    train_with(x, y, params, Execution::default())
}

pub fn train_with(
    x: &FeatureMatrix,
    y: &[bool],
    params: &BoostParams,
    exec: Execution,
) -> Result<BoostModel, BoostError> {
    Trainer::new(x, y, params, exec)?.run(None)
}

pub fn train_logged(
    x: &FeatureMatrix,
    y: &[bool],
    params: &BoostParams,
    exec: Execution,
) -> Result<(BoostModel, TrainingLog), BoostError> {
    let mut log = TrainingLog::default();
    let model = Trainer::new(x, y, params, exec)?.run(Some(&mut log))?;
    Ok((model, log))
}

/// Distinct sorted values of one feature and each row's position among them.
struct FeatureBins {
    values: Vec<f64>,
    bin_of_row: Vec<u32>,
}

impl FeatureBins {
    fn build(x: &FeatureMatrix, feature: usize) -> Self {
        let mut values: Vec<f64> = (0..x.n_rows()).map(|r| x.get(r, feature)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let bin_of_row = (0..x.n_rows())
            .map(|r| {
                let v = x.get(r, feature);
                values.partition_point(|&u| u < v) as u32
            })
            .collect();
        FeatureBins { values, bin_of_row }
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

struct Trainer<'a> {
    x: &'a FeatureMatrix,
    y: &'a [bool],
    params: &'a BoostParams,
    exec: Execution,
    bins: Vec<FeatureBins>,
}

struct RoundState<'s> {
    grad: &'s [f64],
    hess: &'s [f64],
    round: usize,
}

impl<'a> Trainer<'a> {
    fn new(
        x: &'a FeatureMatrix,
        y: &'a [bool],
        params: &'a BoostParams,
        exec: Execution,
    ) -> Result<Self, BoostError> {
        params.validate()?;
        if x.n_rows() == 0 || x.n_features() == 0 {
            return Err(BoostError::EmptyData);
        }
        if y.len() != x.n_rows() {
            return Err(BoostError::LabelCount {
                rows: x.n_rows(),
                labels: y.len(),
            });
        }
        for r in 0..x.n_rows() {
            if let Some(f) = x.row(r).iter().position(|v| !v.is_finite()) {
                return Err(BoostError::NonFinite { row: r, feature: f });
            }
        }
        let features: Vec<usize> = (0..x.n_features()).collect();
        let bins = exec.map(&features, |&f| FeatureBins::build(x, f));
        Ok(Trainer {
            x,
            y,
            params,
            exec,
            bins,
        })
    }

    fn loss(&self, margins: &[f64]) -> f64 {
        margins
            .iter()
            .zip(self.y)
            .map(|(&m, &y)| logistic_loss(y, m))
            .sum()
    }

    fn run(&self, mut log: Option<&mut TrainingLog>) -> Result<BoostModel, BoostError> {
        let n = self.x.n_rows();
        let mut model = BoostModel::empty(self.params.clone(), self.x.n_features());
        let mut margins = vec![model.base_margin; n];
        let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed);
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n];

        if let Some(log) = log.as_deref_mut() {
            log.loss.push(self.loss(&margins));
        }
        for round in 0..self.params.rounds {
            for i in 0..n {
                let p = sigmoid(margins[i]).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
                (grad[i], hess[i]) = grad_hess(self.y[i], p)?;
            }
            let rows = self.sample_rows(&mut rng);
            let state = RoundState {
                grad: &grad,
                hess: &hess,
                round,
            };
            let tree = self.grow(&state, rows, 0, &mut rng, log.as_deref_mut())?;
            for (i, m) in margins.iter_mut().enumerate() {
                *m += tree.predict(self.x.row(i));
            }
            model.trees.push(tree);
            if let Some(log) = log.as_deref_mut() {
                log.loss.push(self.loss(&margins));
            }
        }
        Ok(model)
    }

    fn sample_rows(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let n = self.x.n_rows();
        if self.params.row_subsample >= 1.0 {
            return (0..n).collect();
        }
        let m = ((n as f64 * self.params.row_subsample).round() as usize).clamp(1, n);
        let mut rows = index::sample(rng, n, m).into_vec();
        rows.sort_unstable();
        rows
    }

    fn sample_features(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let nf = self.x.n_features();
        if self.params.col_subsample_per_node >= 1.0 {
            return (0..nf).collect();
        }
        let m = ((nf as f64 * self.params.col_subsample_per_node).round() as usize).clamp(1, nf);
        let mut feats = index::sample(rng, nf, m).into_vec();
        feats.sort_unstable();
        feats
    }

    fn grow(
        &self,
        state: &RoundState<'_>,
        rows: Vec<usize>,
        depth: usize,
        rng: &mut ChaCha8Rng,
        mut log: Option<&mut TrainingLog>,
    ) -> Result<TreeNode, BoostError> {
        let (g, h) = rows.iter().fold((0.0, 0.0), |(g, h), &i| {
            (g + state.grad[i], h + state.hess[i])
        });

        let best = if depth < self.params.max_depth && rows.len() >= 2 {
            let features = self.sample_features(rng);
            let per_feature = self
                .exec
                .map(&features, |&f| self.best_split(state, &rows, f, g, h));
            // fixed-order reduction: ties keep the lowest feature index
            per_feature
                .into_iter()
                .flatten()
                .fold(None::<Candidate>, |best, c| match best {
                    Some(b) if b.gain >= c.gain => Some(b),
                    _ => Some(c),
                })
                .filter(|c| c.gain > 0.0)
        } else {
            None
        };

        let Some(split) = best else {
            let weight = leaf_weight(g, h, self.params.l2_lambda)? * self.params.learning_rate;
            if let Some(log) = log {
                log.leaves.push(LeafLog {
                    round: state.round,
                    grad_sum: g,
                    hess_sum: h,
                    weight,
                });
            }
            return Ok(TreeNode::Leaf { weight });
        };

        if let Some(log) = log.as_deref_mut() {
            log.splits.push(SplitLog {
                round: state.round,
                feature: split.feature,
                threshold: split.threshold,
                gain: split.gain,
            });
        }
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&i| self.x.get(i, split.feature) < split.threshold);
        let left = self.grow(state, left_rows, depth + 1, rng, log.as_deref_mut())?;
        let right = self.grow(state, right_rows, depth + 1, rng, log)?;
        Ok(TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            gain: split.gain,
            left: Box::new(left),
            right: Box::new(right),
        })
    }

    /// Best threshold for one feature; ties keep the lowest threshold.
    fn best_split(
        &self,
        state: &RoundState<'_>,
        rows: &[usize],
        feature: usize,
        g_total: f64,
        h_total: f64,
    ) -> Option<Candidate> {
        let bins = &self.bins[feature];
        let nb = bins.values.len();
        if nb < 2 {
            return None;
        }
        let mut g_bin = vec![0.0; nb];
        let mut h_bin = vec![0.0; nb];
        let mut n_bin = vec![0u32; nb];
        for &i in rows {
            let b = bins.bin_of_row[i] as usize;
            g_bin[b] += state.grad[i];
            h_bin[b] += state.hess[i];
            n_bin[b] += 1;
        }

        let p = self.params;
        let mut best: Option<Candidate> = None;
        let (mut gl, mut hl) = (0.0, 0.0);
        let mut prev: Option<usize> = None;
        for b in (0..nb).filter(|&b| n_bin[b] > 0) {
            if let Some(pb) = prev {
                let (gr, hr) = (g_total - gl, h_total - hl);
                if hl >= p.min_child_weight && hr >= p.min_child_weight {
                    let gain = split_gain(gl, hl, gr, hr, p.l2_lambda, p.min_split_gain);
                    if best.is_none_or(|c| gain > c.gain) {
                        best = Some(Candidate {
                            feature,
                            threshold: 0.5 * (bins.values[pb] + bins.values[b]),
                            gain,
                        });
                    }
                }
            }
            gl += g_bin[b];
            hl += h_bin[b];
            prev = Some(b);
        }
        best
    }
}
