//! L2-regularized logistic regression trained by deterministic full-batch
//! gradient descent with backtracking (Armijo) line search.
//!
//! The objective is `mean log-loss + (l2_strength / (2N)) * ||w||^2` with an
//! unpenalized bias. Starting from zero weights the whole procedure is
//! deterministic, so duplicating every training row changes the optimum only
//! through the `1/N` penalty normalization; holding `l2_strength / N` fixed
//! (e.g. doubling `l2_strength` when doubling the rows) leaves it unchanged.

use serde::{Deserialize, Serialize};

use super::tfidf::FeatureMatrix;
use super::DownstreamError;

/// Optimizer settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub l2_strength: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { l2_strength: 1.0, tol: 1e-4, max_iter: 1000 }
    }
}

/// Trained classifier weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub l2_strength: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Objective value after every accepted step, starting at the zero
    /// initializer.
    pub loss_trace: Vec<f64>,
}

impl LogRegModel {
    pub fn decision_value(&self, row: &[(u32, f64)]) -> f64 {
        self.bias + row.iter().map(|&(col, v)| self.weights[col as usize] * v).sum::<f64>()
    }

    pub fn predict_proba(&self, row: &[(u32, f64)]) -> f64 {
        sigmoid(self.decision_value(row))
    }

    /// Positive-class decision at the fixed 0.5 probability threshold.
    pub fn predict(&self, row: &[(u32, f64)]) -> bool {
        self.decision_value(row) >= 0.0
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable `-[y ln p + (1-y) ln(1-p)]` from the raw decision
/// value.
fn log_loss(z: f64, y: f64) -> f64 {
    z.max(0.0) - z * y + (-z.abs()).exp().ln_1p()
}

/// Mean log-loss plus the scaled L2 penalty at (w, b).
pub fn logreg_objective(x: &FeatureMatrix, y: &[f64], w: &[f64], b: f64, l2: f64) -> f64 {
    let n = x.rows.len() as f64;
    let mut loss = 0.0;
    for (row, &target) in x.rows.iter().zip(y) {
        let z = b + row.iter().map(|&(col, v)| w[col as usize] * v).sum::<f64>();
        loss += log_loss(z, target);
    }
    let penalty = l2 / (2.0 * n) * w.iter().map(|v| v * v).sum::<f64>();
    loss / n + penalty
}

/// Analytic gradient of [`logreg_objective`] with respect to (w, b).
pub fn logreg_gradient(
    x: &FeatureMatrix,
    y: &[f64],
    w: &[f64],
    b: f64,
    l2: f64,
) -> (Vec<f64>, f64) {
    let n = x.rows.len() as f64;
    let mut grad_w = vec![0.0; w.len()];
    let mut grad_b = 0.0;
    for (row, &target) in x.rows.iter().zip(y) {
        let z = b + row.iter().map(|&(col, v)| w[col as usize] * v).sum::<f64>();
        let residual = sigmoid(z) - target;
        grad_b += residual;
        for &(col, v) in row {
            grad_w[col as usize] += residual * v;
        }
    }
    for (g, v) in grad_w.iter_mut().zip(w) {
        *g = *g / n + l2 / n * v;
    }
    (grad_w, grad_b / n)
}

/// Trains on sparse rows with binary targets (1.0 = positive class).
pub fn train_logreg(
    x: &FeatureMatrix,
    y: &[f64],
    cfg: &TrainConfig,
) -> Result<LogRegModel, DownstreamError> {
    assert_eq!(x.rows.len(), y.len(), "row/label count mismatch");
    if x.rows.is_empty() {
        return Err(DownstreamError::EmptyDataset);
    }
    let positives = y.iter().filter(|&&v| v == 1.0).count();
    if positives == 0 || positives == y.len() {
        return Err(DownstreamError::SingleClass);
    }

    let n = x.rows.len() as f64;
    let n_features = x.n_cols;
    let mut w = vec![0.0; n_features];
    let mut b = 0.0;
    // Decision values are maintained incrementally: a candidate step only
    // needs z + t * (X d), so each line-search probe is O(N + V).
    let mut z = vec![0.0; x.rows.len()];

    let objective_from_z = |z: &[f64], w: &[f64]| -> f64 {
        let loss: f64 = z.iter().zip(y).map(|(&zi, &yi)| log_loss(zi, yi)).sum();
        loss / n + cfg.l2_strength / (2.0 * n) * w.iter().map(|v| v * v).sum::<f64>()
    };

    let mut f = objective_from_z(&z, &w);
    if !f.is_finite() {
        return Err(DownstreamError::NonFiniteLoss { iteration: 0 });
    }
    let mut loss_trace = vec![f];
    let mut step = 1.0_f64;
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..cfg.max_iter {
        iterations = iter + 1;
        let mut grad_w = vec![0.0; n_features];
        let mut grad_b = 0.0;
        for (row, (&zi, &yi)) in x.rows.iter().zip(z.iter().zip(y)) {
            let residual = sigmoid(zi) - yi;
            grad_b += residual;
            for &(col, v) in row {
                grad_w[col as usize] += residual * v;
            }
        }
        grad_b /= n;
        let mut grad_inf = grad_b.abs();
        for (g, v) in grad_w.iter_mut().zip(&w) {
            *g = *g / n + cfg.l2_strength / n * v;
            grad_inf = grad_inf.max(g.abs());
        }
        if grad_inf < cfg.tol {
            converged = true;
            iterations = iter;
            break;
        }

        // Descent direction -g; precompute X d once.
        let xd: Vec<f64> = x
            .rows
            .iter()
            .map(|row| -grad_b - row.iter().map(|&(col, v)| grad_w[col as usize] * v).sum::<f64>())
            .collect();
        let grad_norm_sq = grad_b * grad_b + grad_w.iter().map(|g| g * g).sum::<f64>();

        let mut t = step;
        let mut accepted = false;
        for _ in 0..60 {
            let z_next: Vec<f64> = z.iter().zip(&xd).map(|(&zi, &di)| zi + t * di).collect();
            let w_next: Vec<f64> = w.iter().zip(&grad_w).map(|(wi, gi)| wi - t * gi).collect();
            let f_next = objective_from_z(&z_next, &w_next);
            if !f_next.is_finite() {
                return Err(DownstreamError::NonFiniteLoss { iteration: iter + 1 });
            }
            if f_next <= f - 1e-4 * t * grad_norm_sq {
                w = w_next;
                b -= t * grad_b;
                z = z_next;
                f = f_next;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // Step collapsed below resolution: treat as converged.
            converged = grad_inf < cfg.tol.max(1e-10) || true;
            break;
        }
        loss_trace.push(f);
        step = (t * 2.0).min(1e6);
    }

    Ok(LogRegModel {
        weights: w,
        bias: b,
        l2_strength: cfg.l2_strength,
        converged,
        iterations,
        loss_trace,
    })
}
