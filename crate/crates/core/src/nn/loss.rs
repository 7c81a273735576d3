use crate::error::{Error, Result};
use crate::nn::activation::sigmoid;
use crate::tensor::Tensor;

const PROB_FLOOR: f64 = 1e-12;

/// Clamps a probability to `[1e-12, 1 - 1e-12]` so the log loss stays finite.
pub fn clamp_probability(p: f64) -> f64 {
    p.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)
}

/// Binary cross-entropy of one prediction: `-[y ln p + (1-y) ln(1-p)]`.
/// Returns the loss and its derivative with respect to the prediction.
pub fn cross_entropy(prediction: f64, label: f64) -> (f64, f64) {
    let p = clamp_probability(prediction);
    let loss = -(label * p.ln() + (1.0 - label) * (1.0 - p).ln());
    let d_pred = (p - label) / (p * (1.0 - p));
    (loss, d_pred)
}

/// Batch loss: the *sum* of per-example cross-entropies.
pub fn cross_entropy_batch(predictions: &[f64], labels: &[f64]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::shape(format!(
            "cross entropy needs matching lengths, got {} predictions and {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    Ok(predictions
        .iter()
        .zip(labels)
        .map(|(&p, &y)| cross_entropy(p, y).0)
        .sum())
}

/// The Bernoulli output layer: `p(good) = sigmoid(w . features + b)`.
#[derive(Clone, Debug)]
pub struct OutputHead {
    /// Shape `[input_dim]`.
    pub weights: Tensor,
    /// Shape `[1]`.
    pub bias: Tensor,
}

impl OutputHead {
    pub fn zeros(input_dim: usize) -> Self {
        OutputHead {
            weights: Tensor::zeros(&[input_dim]),
            bias: Tensor::zeros(&[1]),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weights.len()
    }

    fn check_input(&self, features: &[f64]) -> Result<()> {
        if features.len() != self.input_dim() {
            return Err(Error::shape(format!(
                "output head expects {} features, got {}",
                self.input_dim(),
                features.len()
            )));
        }
        Ok(())
    }

    /// Probability of the positive (Good) class, clamped away from 0 and 1.
    pub fn predict(&self, features: &[f64]) -> Result<f64> {
        self.check_input(features)?;
        let z: f64 = self
            .weights
            .data()
            .iter()
            .zip(features)
            .map(|(&w, &x)| w * x)
            .sum::<f64>()
            + self.bias.data()[0];
        Ok(clamp_probability(sigmoid(z)))
    }

    /// Gradient of the cross-entropy loss through the sigmoid head. Uses the
    /// fused form `dL/dz = p - y`. Returns `(d_features, d_weights, d_bias)`.
    pub fn backward(&self, features: &[f64], prediction: f64, label: f64) -> Result<(Vec<f64>, Tensor, Tensor)> {
        self.check_input(features)?;
        let dz = prediction - label;
        let d_weights = Tensor::from_vec(
            &[self.input_dim()],
            features.iter().map(|&x| x * dz).collect(),
        )?;
        let d_bias = Tensor::scalar(dz);
        let d_features = self.weights.data().iter().map(|&w| w * dz).collect();
        Ok((d_features, d_weights, d_bias))
    }
}
