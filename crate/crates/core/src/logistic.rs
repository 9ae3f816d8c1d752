//! Logistic-regression baseline: feature standardization plus
//! full-batch gradient descent on the mean log-loss, weights
//! initialized to zero.

use serde::{Deserialize, Serialize};

use crate::dataset::{Label, Sample};
use crate::error::{Error, Result};
use crate::features::FEATURE_COUNT;

/// Trainer knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self { learning_rate: 0.1, epochs: 500 }
    }
}

/// Trained model, carrying the standardization constants fitted on the
/// training set. A feature with zero variance standardizes to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: [f64; FEATURE_COUNT],
    pub bias: f64,
    pub means: [f64; FEATURE_COUNT],
    pub stds: [f64; FEATURE_COUNT],
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^t) without overflow.
fn softplus(t: f64) -> f64 {
    if t > 30.0 {
        t
    } else if t < -30.0 {
        t.exp()
    } else {
        t.exp().ln_1p()
    }
}

/// Mean log-loss of `(weights, bias)` on standardized inputs `xs` with
/// targets `ys` in {0, 1}.
pub fn log_loss(weights: &[f64; FEATURE_COUNT], bias: f64, xs: &[[f64; 4]], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    xs.iter()
        .zip(ys)
        .map(|(x, y)| {
            let t: f64 = weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + bias;
            // -y ln sigma(t) - (1-y) ln(1 - sigma(t))
            y * softplus(-t) + (1.0 - y) * softplus(t)
        })
        .sum::<f64>()
        / n
}

/// Analytic gradient of [`log_loss`] with respect to weights and bias.
pub fn log_loss_gradient(
    weights: &[f64; FEATURE_COUNT],
    bias: f64,
    xs: &[[f64; 4]],
    ys: &[f64],
) -> ([f64; FEATURE_COUNT], f64) {
    let n = xs.len() as f64;
    let mut grad_w = [0.0; FEATURE_COUNT];
    let mut grad_b = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let t: f64 = weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + bias;
        let residual = sigmoid(t) - y;
        for (g, v) in grad_w.iter_mut().zip(x) {
            *g += residual * v;
        }
        grad_b += residual;
    }
    for g in &mut grad_w {
        *g /= n;
    }
    (grad_w, grad_b / n)
}

/// Per-feature mean and standard deviation of the samples.
fn standardization(samples: &[Sample]) -> ([f64; FEATURE_COUNT], [f64; FEATURE_COUNT]) {
    let n = samples.len() as f64;
    let mut means = [0.0; FEATURE_COUNT];
    for s in samples {
        for (m, v) in means.iter_mut().zip(s.values()) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let mut vars = [0.0; FEATURE_COUNT];
    for s in samples {
        for ((var, v), m) in vars.iter_mut().zip(s.values()).zip(means) {
            *var += (v - m) * (v - m);
        }
    }
    let stds = vars.map(|v| (v / n).sqrt());
    (means, stds)
}

fn standardize(values: [f64; 4], means: &[f64; 4], stds: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = if stds[i] > 0.0 { (values[i] - means[i]) / stds[i] } else { 0.0 };
    }
    out
}

/// Trains the baseline. Errors when only one class is present.
pub fn train_logistic(samples: &[Sample], params: &LogisticParams) -> Result<LogisticModel> {
    let infected = samples.iter().filter(|s| s.label == Label::Infected).count();
    if infected == 0 || infected == samples.len() {
        return Err(Error::invalid(
            "logistic training needs both classes present",
        ));
    }
    let (means, stds) = standardization(samples);
    let xs: Vec<[f64; 4]> = samples.iter().map(|s| standardize(s.values(), &means, &stds)).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.label.index() as f64).collect();

    let mut weights = [0.0; FEATURE_COUNT];
    let mut bias = 0.0;
    for _ in 0..params.epochs {
        let (grad_w, grad_b) = log_loss_gradient(&weights, bias, &xs, &ys);
        for (w, g) in weights.iter_mut().zip(grad_w) {
            *w -= params.learning_rate * g;
        }
        bias -= params.learning_rate * grad_b;
    }
    Ok(LogisticModel { weights, bias, means, stds })
}

impl LogisticModel {
    pub fn predict_proba(&self, x: &[f64; 4]) -> f64 {
        let z = standardize(*x, &self.means, &self.stds);
        let t: f64 = self.weights.iter().zip(z).map(|(w, v)| w * v).sum::<f64>() + self.bias;
        sigmoid(t)
    }

    pub fn predict(&self, x: &[f64; 4]) -> Label {
        if self.predict_proba(x) >= 0.5 {
            Label::Infected
        } else {
            Label::Uninfected
        }
    }
}
