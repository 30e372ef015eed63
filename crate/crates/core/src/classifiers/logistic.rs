use serde::{Deserialize, Serialize};

use super::ClassifierError;
use crate::features::SparseVector;
use crate::float_format;

/// One weighted binary training example.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingExample {
    pub features: SparseVector,
    pub label: bool,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticTrainConfig {
    #[serde(with = "float_format::scalar")]
    pub l2_lambda: f64,
    pub max_iters: usize,
    /// Stop once the ∞-norm of the weight-normalized gradient drops below
    /// this value.
    #[serde(with = "float_format::scalar")]
    pub tolerance: f64,
    #[serde(with = "float_format::scalar")]
    pub decision_threshold: f64,
}

impl Default for LogisticTrainConfig {
    fn default() -> Self {
        Self {
            l2_lambda: 1.0,
            max_iters: 1000,
            tolerance: 1e-6,
            decision_threshold: 0.5,
        }
    }
}

impl LogisticTrainConfig {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        let bad = |m: &str| Err(ClassifierError::InvalidConfig(m.into()));
        if !(self.l2_lambda.is_finite() && self.l2_lambda >= 0.0) {
            return bad("l2_lambda must be finite and non-negative");
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return bad("tolerance must be finite and non-negative");
        }
        if !(self.decision_threshold > 0.0 && self.decision_threshold < 1.0) {
            return bad("decision_threshold must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    #[serde(with = "float_format::vec")]
    pub weights: Vec<f64>,
    #[serde(with = "float_format::scalar")]
    pub bias: f64,
    pub train_config: LogisticTrainConfig,
}

impl LogisticModel {
    pub fn zeros(dim: usize, train_config: LogisticTrainConfig) -> Self {
        Self {
            weights: vec![0.0; dim],
            bias: 0.0,
            train_config,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Per-example negative log-likelihood at margin `z`.
fn nll(z: f64, label: bool) -> f64 {
    if label {
        softplus(-z)
    } else {
        softplus(z)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossGrad {
    pub loss: f64,
    pub grad_weights: Vec<f64>,
    pub grad_bias: f64,
}

fn check_dims(dim: usize, examples: &[TrainingExample]) -> Result<(), ClassifierError> {
    match examples.iter().find(|e| e.features.dim() != dim) {
        Some(e) => Err(ClassifierError::DimensionMismatch {
            expected: dim,
            found: e.features.dim(),
        }),
        None => Ok(()),
    }
}

/// Weighted cross-entropy plus `(λ/2)·‖weights‖²` (bias unregularized) and
/// its exact gradient.
pub fn logistic_loss_grad(
    weights: &[f64],
    bias: f64,
    examples: &[TrainingExample],
    l2_lambda: f64,
) -> Result<LossGrad, ClassifierError> {
    check_dims(weights.len(), examples)?;
    let margins: Vec<f64> = examples
        .iter()
        .map(|e| e.features.dot(weights) + bias)
        .collect();
    Ok(loss_grad_at(weights, &margins, examples, l2_lambda))
}

fn loss_grad_at(
    weights: &[f64],
    margins: &[f64],
    examples: &[TrainingExample],
    l2_lambda: f64,
) -> LossGrad {
    let mut loss = 0.0;
    let mut grad_weights: Vec<f64> = weights.iter().map(|w| l2_lambda * w).collect();
    let mut grad_bias = 0.0;
    for (e, &z) in examples.iter().zip(margins) {
        loss += e.weight * nll(z, e.label);
        let residual = e.weight * (sigmoid(z) - if e.label { 1.0 } else { 0.0 });
        grad_bias += residual;
        for (i, v) in e.features.iter() {
            grad_weights[i] += residual * v;
        }
    }
    loss += 0.5 * l2_lambda * dot(weights, weights);
    LossGrad {
        loss,
        grad_weights,
        grad_bias,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const ARMIJO_C: f64 = 1e-4;
const MIN_STEP: f64 = 1e-16;

/// Full-batch gradient descent with Armijo backtracking, starting from zero.
///
/// The objective is divided by the total example weight before optimizing,
/// which leaves the minimizer unchanged but makes the iterates invariant to
/// rescaling every weight by the same constant. The initial trial step of
/// each line search is the Barzilai–Borwein estimate from the previous
/// iteration.
pub fn train_logistic(
    examples: &[TrainingExample],
    dim: usize,
    config: &LogisticTrainConfig,
) -> Result<LogisticModel, ClassifierError> {
    config.validate()?;
    check_dims(dim, examples)?;
    for (index, e) in examples.iter().enumerate() {
        if !(e.weight.is_finite() && e.weight > 0.0) {
            return Err(ClassifierError::InvalidWeight {
                index,
                weight: e.weight,
            });
        }
        if !e.features.all_finite() {
            return Err(ClassifierError::NonFiniteFeature(index));
        }
    }
    let has_pos = examples.iter().any(|e| e.label);
    let has_neg = examples.iter().any(|e| !e.label);
    if !(has_pos && has_neg) {
        return Err(ClassifierError::DegenerateLabels);
    }

    let scale = 1.0 / examples.iter().map(|e| e.weight).sum::<f64>();
    let lambda = config.l2_lambda;
    let objective = |weights: &[f64], margins: &[f64]| -> LossGrad {
        let mut lg = loss_grad_at(weights, margins, examples, lambda);
        lg.loss *= scale;
        lg.grad_bias *= scale;
        lg.grad_weights.iter_mut().for_each(|g| *g *= scale);
        lg
    };
    let margins_of = |weights: &[f64], bias: f64| -> Vec<f64> {
        examples
            .iter()
            .map(|e| e.features.dot(weights) + bias)
            .collect()
    };

    let mut weights = vec![0.0; dim];
    let mut bias = 0.0;
    let mut margins = vec![0.0; examples.len()];
    let mut current = objective(&weights, &margins);
    let mut step = 1.0;

    for _ in 0..config.max_iters {
        let grad_inf = current
            .grad_weights
            .iter()
            .fold(current.grad_bias.abs(), |m, g| m.max(g.abs()));
        if grad_inf < config.tolerance {
            break;
        }
        let grad_sq = dot(&current.grad_weights, &current.grad_weights)
            + current.grad_bias * current.grad_bias;
        // margin change per unit step along -gradient
        let direction: Vec<f64> = examples
            .iter()
            .map(|e| -(e.features.dot(&current.grad_weights) + current.grad_bias))
            .collect();
        let w_dot_g = dot(&weights, &current.grad_weights);
        let w_sq = dot(&weights, &weights);

        let trial_loss = |t: f64| -> f64 {
            let data: f64 = examples
                .iter()
                .zip(&margins)
                .zip(&direction)
                .map(|((e, &z), &d)| e.weight * nll(z + t * d, e.label))
                .sum();
            let reg_sq = w_sq - 2.0 * t * w_dot_g + t * t * grad_sq;
            scale * (data + 0.5 * lambda * reg_sq.max(0.0))
        };

        let mut t = step;
        let mut accepted = false;
        while t >= MIN_STEP {
            if trial_loss(t) <= current.loss - ARMIJO_C * t * grad_sq {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }

        let new_weights: Vec<f64> = weights
            .iter()
            .zip(&current.grad_weights)
            .map(|(w, g)| w - t * g)
            .collect();
        let new_bias = bias - t * current.grad_bias;
        let new_margins = margins_of(&new_weights, new_bias);
        let next = objective(&new_weights, &new_margins);

        // Barzilai–Borwein: s = -t·g, y = g_next - g
        let mut s_dot_y = -t * current.grad_bias * (next.grad_bias - current.grad_bias);
        for (g, gn) in current.grad_weights.iter().zip(&next.grad_weights) {
            s_dot_y += -t * g * (gn - g);
        }
        let s_sq = t * t * grad_sq;
        step = if s_dot_y > 0.0 {
            (s_sq / s_dot_y).clamp(1e-10, 1e10)
        } else {
            (2.0 * t).min(1e10)
        };

        weights = new_weights;
        bias = new_bias;
        margins = new_margins;
        current = next;
    }

    Ok(LogisticModel {
        weights,
        bias,
        train_config: *config,
    })
}

pub fn predict_proba(model: &LogisticModel, x: &SparseVector) -> Result<f64, ClassifierError> {
    if x.dim() != model.dim() {
        return Err(ClassifierError::DimensionMismatch {
            expected: model.dim(),
            found: x.dim(),
        });
    }
    Ok(sigmoid(x.dot(&model.weights) + model.bias))
}

/// `predict_proba(x) ≥ decision_threshold`.
pub fn predict(model: &LogisticModel, x: &SparseVector) -> Result<bool, ClassifierError> {
    Ok(predict_proba(model, x)? >= model.train_config.decision_threshold)
}
