//! One-vs-rest logistic regression on standardized features.

use rayon::prelude::*;

/// Training settings. Defaults: L2 weight 1e-4, step 1, at most 500 epochs,
/// stop when the gradient norm falls below 1e-5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub l2: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub tolerance: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            learning_rate: 1.0,
            max_epochs: 500,
            tolerance: 1e-5,
        }
    }
}

/// `classes` binary models over `dim` standardized features plus a bias.
#[derive(Debug, Clone, PartialEq)]
pub struct OneVsRest {
    pub dim: usize,
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    /// Per class: `dim` weights followed by the bias.
    pub weights: Vec<Vec<f64>>,
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl OneVsRest {
    /// Full-batch gradient descent on the mean logistic loss; the bias is not
    /// regularized. `features` is row-major, `dim` values per sample.
    pub fn train(features: &[f64], dim: usize, labels: &[usize], classes: usize, cfg: TrainConfig) -> Self {
        let n = labels.len();
        assert_eq!(features.len(), n * dim);
        let mut mean = vec![0.0; dim];
        let mut scale = vec![0.0; dim];
        for row in features.chunks(dim) {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        for row in features.chunks(dim) {
            for k in 0..dim {
                scale[k] += (row[k] - mean[k]).powi(2);
            }
        }
        // Constant features keep unit scale and end up as zeros.
        scale.iter_mut().for_each(|s| {
            let sd = (*s / n as f64).sqrt();
            *s = if sd > 0.0 { sd } else { 1.0 };
        });
        let x: Vec<f64> = features
            .chunks(dim)
            .flat_map(|row| (0..dim).map(|k| (row[k] - mean[k]) / scale[k]).collect::<Vec<_>>())
            .collect();

        let weights = (0..classes)
            .into_par_iter()
            .map(|c| {
                let mut w = vec![0.0; dim + 1];
                let mut grad = vec![0.0; dim + 1];
                for _ in 0..cfg.max_epochs {
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    for (row, &l) in x.chunks(dim).zip(labels) {
                        let z = w[dim] + row.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
                        let err = sigmoid(z) - (l == c) as u8 as f64;
                        for k in 0..dim {
                            grad[k] += err * row[k];
                        }
                        grad[dim] += err;
                    }
                    for k in 0..dim {
                        grad[k] = grad[k] / n as f64 + cfg.l2 * w[k];
                    }
                    grad[dim] /= n as f64;
                    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                    if norm < cfg.tolerance {
                        break;
                    }
                    for k in 0..=dim {
                        w[k] -= cfg.learning_rate * grad[k];
                    }
                }
                w
            })
            .collect();
        Self {
            dim,
            mean,
            scale,
            weights,
        }
    }

    /// Class with the highest score; ties go to the lower class.
    pub fn predict(&self, sample: &[f64]) -> usize {
        let z: Vec<f64> = (0..self.dim)
            .map(|k| (sample[k] - self.mean[k]) / self.scale[k])
            .collect();
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (c, w) in self.weights.iter().enumerate() {
            let s = w[self.dim] + z.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
            if s > best_score {
                best = c;
                best_score = s;
            }
        }
        best
    }

    /// Fraction of misclassified samples.
    pub fn error_rate(&self, features: &[f64], labels: &[usize]) -> f64 {
        let wrong = features
            .chunks(self.dim)
            .zip(labels)
            .filter(|(row, &l)| self.predict(row) != l)
            .count();
        wrong as f64 / labels.len() as f64
    }
}
