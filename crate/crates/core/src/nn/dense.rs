use crate::error::{Error, Result};
use crate::nn::activation::Activation;
use crate::tensor::Tensor;

/// A fully-connected layer `y = f(V^T x + b)`.
///
/// `weights` has shape `[input_dim, output_dim]`; column `j` holds the
/// incoming weights of hidden unit `j`.
#[derive(Clone, Debug)]
pub struct DenseLayer {
    pub weights: Tensor,
    pub bias: Tensor,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn zeros(input_dim: usize, output_dim: usize, activation: Activation) -> Self {
        DenseLayer {
            weights: Tensor::zeros(&[input_dim, output_dim]),
            bias: Tensor::zeros(&[output_dim]),
            activation,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.cols()
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::shape(format!(
                "dense layer expects input of {} values, got {}",
                self.input_dim(),
                x.len()
            )));
        }
        Ok(())
    }

    /// Forward pass returning the activations and the pre-activations.
    pub fn forward_cached(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_input(x)?;
        let out = self.output_dim();
        let mut pre = vec![0.0; out];
        for (j, p) in pre.iter_mut().enumerate() {
            let mut z = self.bias.data()[j];
            for (i, &xi) in x.iter().enumerate() {
                z += self.weights.at(i, j) * xi;
            }
            *p = z;
        }
        let y = pre.iter().map(|&z| self.activation.apply(z)).collect();
        Ok((y, pre))
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward_cached(x)?.0)
    }

    /// Backward pass given the cached pre-activations and the gradient of
    /// the loss with respect to the layer output. Returns
    /// `(d_input, d_weights, d_bias)`.
    pub fn backward(&self, x: &[f64], pre: &[f64], d_out: &[f64]) -> Result<(Vec<f64>, Tensor, Tensor)> {
        self.check_input(x)?;
        let out = self.output_dim();
        if pre.len() != out || d_out.len() != out {
            return Err(Error::shape(format!(
                "dense backward expects {out} output gradients, got {} (pre {})",
                d_out.len(),
                pre.len()
            )));
        }
        let d_pre: Vec<f64> = pre
            .iter()
            .zip(d_out)
            .map(|(&z, &dy)| dy * self.activation.derivative(z))
            .collect();

        let mut d_weights = Tensor::zeros(&[self.input_dim(), out]);
        let mut d_bias = Tensor::zeros(&[out]);
        let mut d_input = vec![0.0; self.input_dim()];
        for (j, &dz) in d_pre.iter().enumerate() {
            d_bias.data_mut()[j] = dz;
            for (i, &xi) in x.iter().enumerate() {
                *d_weights.at_mut(i, j) = xi * dz;
                d_input[i] += self.weights.at(i, j) * dz;
            }
        }
        Ok((d_input, d_weights, d_bias))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_layer_maps_everything_to_zero() {
        let layer = DenseLayer::zeros(3, 2, Activation::Relu);
        let y = layer.forward(&[1.0, -4.0, 2.5]).unwrap();
        assert_eq!(y, vec![0.0, 0.0]);
    }

    #[test]
    fn identity_weights_pass_input_through() {
        let mut layer = DenseLayer::zeros(3, 3, Activation::Identity);
        for i in 0..3 {
            *layer.weights.at_mut(i, i) = 1.0;
        }
        let x = [0.5, -1.25, 3.0];
        assert_eq!(layer.forward(&x).unwrap(), x.to_vec());
    }

    #[test]
    fn rejects_wrong_input_length() {
        let layer = DenseLayer::zeros(3, 2, Activation::Relu);
        assert!(layer.forward(&[1.0, 2.0]).is_err());
    }
}
