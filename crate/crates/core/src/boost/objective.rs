//! Second-order logistic objective: gradients, split gain and leaf weights.

use super::BoostError;

pub fn sigmoid(margin: f64) -> f64 {
    if margin >= 0.0 {
        1.0 / (1.0 + (-margin).exp())
    } else {
        let e = margin.exp();
        e / (1.0 + e)
    }
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Logistic loss of one sample at the given margin.
pub fn logistic_loss(label: bool, margin: f64) -> f64 {
    if label {
        softplus(-margin)
    } else {
        softplus(margin)
    }
}

/// Gradient and hessian of the logistic loss with respect to the margin.
pub fn grad_hess(label: bool, prob: f64) -> Result<(f64, f64), BoostError> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(BoostError::ProbabilityOutOfRange(prob));
    }
    let y = if label { 1.0 } else { 0.0 };
    Ok((prob - y, prob * (1.0 - prob)))
}

fn score(g: f64, h: f64, lambda: f64) -> f64 {
    let denom = h + lambda;
    if denom > 0.0 {
        g * g / denom
    } else {
        0.0
    }
}

/// Loss reduction from splitting a node into (left, right), minus `min_split_gain`.
///
/// A side whose `h + lambda` is zero contributes nothing.
pub fn split_gain(gl: f64, hl: f64, gr: f64, hr: f64, lambda: f64, min_split_gain: f64) -> f64 {
    0.5 * (score(gl, hl, lambda) + score(gr, hr, lambda) - score(gl + gr, hl + hr, lambda))
        - min_split_gain
}

/// Minimiser of `g*w + (h + lambda)*w^2/2`.
pub fn leaf_weight(g: f64, h: f64, lambda: f64) -> Result<f64, BoostError> {
    let denom = h + lambda;
    if denom.is_nan() || denom <= 0.0 {
        return Err(BoostError::ZeroCurvature);
    }
    Ok(-g / denom)
}
