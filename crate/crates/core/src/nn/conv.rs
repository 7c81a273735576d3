use crate::error::{Error, Result};
use crate::nn::activation::Activation;
use crate::tensor::Tensor;

/// A 1-D convolution layer using *wide* convolution: the input is implicitly
/// zero-padded so every filter position that touches the sequence produces an
/// output, giving feature maps of length `T + L - 1` for an input of `T`
/// steps and filters of length `L`. Output position `t` covers input steps
/// `t-L+1 ..= t`. There is no bias term.
#[derive(Clone, Debug)]
pub struct Conv1dLayer {
    /// Shape `[n_filters, filter_len * input_dim]`, each row one filter.
    pub filters: Tensor,
    pub filter_len: usize,
    pub input_dim: usize,
    pub activation: Activation,
}

impl Conv1dLayer {
    pub fn zeros(n_filters: usize, filter_len: usize, input_dim: usize, activation: Activation) -> Self {
        assert!(filter_len >= 1, "filter length must be at least 1");
        Conv1dLayer {
            filters: Tensor::zeros(&[n_filters, filter_len * input_dim]),
            filter_len,
            input_dim,
            activation,
        }
    }

    pub fn n_filters(&self) -> usize {
        self.filters.rows()
    }

    /// Feature-map length for an input of `t_steps` steps.
    pub fn map_len(&self, t_steps: usize) -> usize {
        t_steps + self.filter_len - 1
    }

    fn check_input(&self, x: &[f64]) -> Result<usize> {
        if self.input_dim == 0 || x.is_empty() || x.len() % self.input_dim != 0 {
            return Err(Error::shape(format!(
                "conv input length {} is not a positive multiple of input dim {}",
                x.len(),
                self.input_dim
            )));
        }
        Ok(x.len() / self.input_dim)
    }

    /// Forward pass over a row-major `[T, D]` input. Returns the activated
    /// feature maps and the pre-activation maps, both `[n_filters, T+L-1]`.
    pub fn forward_cached(&self, x: &[f64]) -> Result<(Tensor, Tensor)> {
        let t_steps = self.check_input(x)?;
        let m = self.map_len(t_steps);
        let d = self.input_dim;
        let l = self.filter_len;
        let mut pre = Tensor::zeros(&[self.n_filters(), m]);
        for f in 0..self.n_filters() {
            for j in 0..m {
                let mut z = 0.0;
                for li in 0..l {
                    // input step covered by filter tap li at output position j
                    let step = j as isize - (l as isize - 1) + li as isize;
                    if step < 0 || step >= t_steps as isize {
                        continue;
                    }
                    let base = step as usize * d;
                    for di in 0..d {
                        z += self.filters.at(f, li * d + di) * x[base + di];
                    }
                }
                *pre.at_mut(f, j) = z;
            }
        }
        let mut maps = pre.clone();
        for v in maps.data_mut() {
            *v = self.activation.apply(*v);
        }
        Ok((maps, pre))
    }

    pub fn forward(&self, x: &[f64]) -> Result<Tensor> {
        Ok(self.forward_cached(x)?.0)
    }

    /// Backward pass. `d_maps` is the gradient with respect to the activated
    /// maps; returns `(d_input, d_filters)`.
    pub fn backward(&self, x: &[f64], pre: &Tensor, d_maps: &Tensor) -> Result<(Vec<f64>, Tensor)> {
        let t_steps = self.check_input(x)?;
        let m = self.map_len(t_steps);
        if pre.shape() != [self.n_filters(), m] || d_maps.shape() != [self.n_filters(), m] {
            return Err(Error::shape(format!(
                "conv backward expects maps of shape [{}, {m}]",
                self.n_filters()
            )));
        }
        let d = self.input_dim;
        let l = self.filter_len;
        let mut d_filters = Tensor::zeros(&[self.n_filters(), l * d]);
        let mut d_input = vec![0.0; x.len()];
        for f in 0..self.n_filters() {
            for j in 0..m {
                let dz = d_maps.at(f, j) * self.activation.derivative(pre.at(f, j));
                if dz == 0.0 {
                    continue;
                }
                for li in 0..l {
                    let step = j as isize - (l as isize - 1) + li as isize;
                    if step < 0 || step >= t_steps as isize {
                        continue;
                    }
                    let base = step as usize * d;
                    for di in 0..d {
                        *d_filters.at_mut(f, li * d + di) += x[base + di] * dz;
                        d_input[base + di] += self.filters.at(f, li * d + di) * dz;
                    }
                }
            }
        }
        Ok((d_input, d_filters))
    }
}
