//! Regularized linear least squares and multinomial logistic regression,
//! built directly on the normal equations and full-batch gradient descent.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::LearnError;

/// Multi-output ridge regressor solved via the normal equations. The column
/// flagged as bias is excluded from the penalty so constant targets are fit
/// exactly at any regularization strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeRegressor {
    /// `d_in x d_out`, stored row-major as nested vecs for stable serialization.
    pub weights: Vec<Vec<f64>>,
    pub lambda: f64,
    pub bias_col: Option<usize>,
}

impl RidgeRegressor {
    pub fn fit(
        xs: &[Vec<f64>],
        ys: &[Vec<f64>],
        lambda: f64,
        bias_col: Option<usize>,
    ) -> Result<Self, LearnError> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(LearnError::EmptyTrainingSet);
        }
        let n = xs.len();
        let d_in = xs[0].len();
        let d_out = ys[0].len();
        let x = DMatrix::from_fn(n, d_in, |i, j| xs[i][j]);
        let y = DMatrix::from_fn(n, d_out, |i, j| ys[i][j]);

        let mut gram = x.transpose() * &x;
        for j in 0..d_in {
            if Some(j) != bias_col {
                gram[(j, j)] += lambda;
            }
        }
        let xty = x.transpose() * &y;

        let solution = match gram.clone().cholesky() {
            Some(chol) => chol.solve(&xty),
            None => {
                // Unpenalized bias direction can make the system singular for
                // degenerate inputs; nudge the diagonal and fall back to LU.
                for j in 0..d_in {
                    gram[(j, j)] += 1e-10;
                }
                gram.lu().solve(&xty).ok_or(LearnError::Singular)?
            }
        };

        let weights = (0..d_in)
            .map(|i| (0..d_out).map(|j| solution[(i, j)]).collect())
            .collect();
        Ok(RidgeRegressor {
            weights,
            lambda,
            bias_col,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.weights.len()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn predict(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.input_dim(), "input dimension mismatch");
        let d_out = self.output_dim();
        let mut out = vec![0.0; d_out];
        for (xi, row) in x.iter().zip(self.weights.iter()) {
            for (o, w) in out.iter_mut().zip(row.iter()) {
                *o += xi * w;
            }
        }
        out
    }

    /// Frobenius norm of the weight matrix; the post-hoc norm bound used by
    /// the capacity estimates.
    pub fn weight_norm(&self) -> f64 {
        self.weights
            .iter()
            .flat_map(|row| row.iter())
            .map(|w| w * w)
            .sum::<f64>()
            .sqrt()
    }

    pub fn train_mse(&self, xs: &[Vec<f64>], ys: &[Vec<f64>]) -> f64 {
        let mut total = 0.0;
        for (x, y) in xs.iter().zip(ys.iter()) {
            let pred = self.predict(x);
            total += pred
                .iter()
                .zip(y.iter())
                .map(|(p, t)| (p - t).powi(2))
                .sum::<f64>()
                / y.len() as f64;
        }
        total / xs.len() as f64
    }
}

/// Multinomial logistic regression trained by deterministic full-batch
/// gradient descent from zero-initialized weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxClassifier {
    /// `n_classes x d_in`.
    pub weights: Vec<Vec<f64>>,
    pub loss_history: Vec<f64>,
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

impl SoftmaxClassifier {
    pub fn fit(
        xs: &[Vec<f64>],
        labels: &[usize],
        n_classes: usize,
        loss_weight: f64,
        step: f64,
        iters: usize,
    ) -> Result<Self, LearnError> {
        if xs.is_empty() || xs.len() != labels.len() {
            return Err(LearnError::EmptyTrainingSet);
        }
        let n = xs.len();
        let d_in = xs[0].len();
        let mut weights = vec![vec![0.0; d_in]; n_classes];
        let mut loss_history = Vec::with_capacity(iters);

        for _ in 0..iters {
            let mut grad = vec![vec![0.0; d_in]; n_classes];
            let mut loss = 0.0;
            for (x, &label) in xs.iter().zip(labels.iter()) {
                let logits: Vec<f64> = weights
                    .iter()
                    .map(|w| w.iter().zip(x.iter()).map(|(wi, xi)| wi * xi).sum())
                    .collect();
                let probs = softmax(&logits);
                loss -= probs[label].max(1e-300).ln();
                for (c, p) in probs.iter().enumerate() {
                    let err = p - if c == label { 1.0 } else { 0.0 };
                    for (g, xi) in grad[c].iter_mut().zip(x.iter()) {
                        *g += err * xi;
                    }
                }
            }
            loss_history.push(loss_weight * loss / n as f64);
            let scale = step * loss_weight / n as f64;
            for (wrow, grow) in weights.iter_mut().zip(grad.iter()) {
                for (w, g) in wrow.iter_mut().zip(grow.iter()) {
                    *w -= scale * g;
                }
            }
        }
        Ok(SoftmaxClassifier {
            weights,
            loss_history,
        })
    }

    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| w.iter().zip(x.iter()).map(|(wi, xi)| wi * xi).sum())
            .collect()
    }

    /// Argmax class; ties break on the lowest class index.
    pub fn predict(&self, x: &[f64]) -> usize {
        let logits = self.logits(x);
        let mut best = 0;
        for (c, l) in logits.iter().enumerate() {
            if *l > logits[best] {
                best = c;
            }
        }
        best
    }

    pub fn mean_cross_entropy(&self, xs: &[Vec<f64>], labels: &[usize]) -> f64 {
        let mut loss = 0.0;
        for (x, &label) in xs.iter().zip(labels.iter()) {
            let probs = softmax(&self.logits(x));
            loss -= probs[label].max(1e-300).ln();
        }
        loss / xs.len() as f64
    }
}
