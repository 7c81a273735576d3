use crate::error::{Error, Result};
use crate::nn::activation::Activation;
use crate::tensor::Tensor;

/// `z = U h + V x (+ b)` for one recurrent unit bank.
fn affine(w_rec: &Tensor, w_in: &Tensor, bias: Option<&Tensor>, h: &[f64], x: &[f64]) -> Vec<f64> {
    let n = w_rec.rows();
    let mut z = vec![0.0; n];
    for (i, zi) in z.iter_mut().enumerate() {
        let mut acc = bias.map_or(0.0, |b| b.data()[i]);
        for (j, &hj) in h.iter().enumerate() {
            acc += w_rec.at(i, j) * hj;
        }
        for (j, &xj) in x.iter().enumerate() {
            acc += w_in.at(i, j) * xj;
        }
        *zi = acc;
    }
    z
}

fn outer_add(grad: &mut Tensor, dz: &[f64], v: &[f64]) {
    for (i, &dzi) in dz.iter().enumerate() {
        for (j, &vj) in v.iter().enumerate() {
            *grad.at_mut(i, j) += dzi * vj;
        }
    }
}

fn transpose_apply(w: &Tensor, dz: &[f64], out: &mut [f64]) {
    for (i, &dzi) in dz.iter().enumerate() {
        for (j, o) in out.iter_mut().enumerate() {
            *o += w.at(i, j) * dzi;
        }
    }
}

/// Simple recurrent layer `h_t = f(U h_{t-1} + V x_t)`; no bias term.
#[derive(Clone, Debug)]
pub struct RnnLayer {
    /// `U`, shape `[hidden, hidden]`.
    pub w_rec: Tensor,
    /// `V`, shape `[hidden, input_dim]`.
    pub w_in: Tensor,
    pub activation: Activation,
}

/// Parameter gradients of a simple RNN unrolled over a sequence.
pub struct RnnGradients {
    pub d_w_rec: Tensor,
    pub d_w_in: Tensor,
    pub d_inputs: Vec<Vec<f64>>,
}

impl RnnLayer {
    pub fn zeros(hidden: usize, input_dim: usize, activation: Activation) -> Self {
        RnnLayer {
            w_rec: Tensor::zeros(&[hidden, hidden]),
            w_in: Tensor::zeros(&[hidden, input_dim]),
            activation,
        }
    }

    pub fn hidden_size(&self) -> usize {
        self.w_rec.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.w_in.cols()
    }

    fn check_shapes(&self, h_prev: &[f64], x: &[f64]) -> Result<()> {
        if h_prev.len() != self.hidden_size() || x.len() != self.input_dim() {
            return Err(Error::shape(format!(
                "rnn step expects hidden {} and input {}, got {} and {}",
                self.hidden_size(),
                self.input_dim(),
                h_prev.len(),
                x.len()
            )));
        }
        Ok(())
    }

    pub fn step(&self, h_prev: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.step_cached(h_prev, x)?.0)
    }

    fn step_cached(&self, h_prev: &[f64], x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_shapes(h_prev, x)?;
        let pre = affine(&self.w_rec, &self.w_in, None, h_prev, x);
        let h = pre.iter().map(|&z| self.activation.apply(z)).collect();
        Ok((h, pre))
    }

    /// Unrolls the layer from a zero initial state, returning the hidden
    /// states and pre-activations per step.
    pub fn forward_sequence(&self, steps: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        let mut states = Vec::with_capacity(steps.len());
        let mut pres = Vec::with_capacity(steps.len());
        let mut h = vec![0.0; self.hidden_size()];
        for x in steps {
            let (h_new, pre) = self.step_cached(&h, x)?;
            states.push(h_new.clone());
            pres.push(pre);
            h = h_new;
        }
        Ok((states, pres))
    }

    /// Backpropagation through time. `d_states[t]` is the gradient flowing
    /// into `h_t` from outside the recurrence (e.g. from pooling).
    pub fn backward_sequence(
        &self,
        steps: &[Vec<f64>],
        states: &[Vec<f64>],
        pres: &[Vec<f64>],
        d_states: &[Vec<f64>],
    ) -> Result<RnnGradients> {
        let n = self.hidden_size();
        let t_len = steps.len();
        if states.len() != t_len || pres.len() != t_len || d_states.len() != t_len {
            return Err(Error::shape("rnn backward: sequence lengths differ"));
        }
        let mut d_w_rec = Tensor::zeros(&[n, n]);
        let mut d_w_in = Tensor::zeros(&[n, self.input_dim()]);
        let mut d_inputs = vec![vec![0.0; self.input_dim()]; t_len];
        let zero_state = vec![0.0; n];
        let mut carry = vec![0.0; n];
        for t in (0..t_len).rev() {
            let mut dz = vec![0.0; n];
            for i in 0..n {
                let dh = d_states[t][i] + carry[i];
                dz[i] = dh * self.activation.derivative(pres[t][i]);
            }
            let h_prev = if t == 0 { &zero_state } else { &states[t - 1] };
            outer_add(&mut d_w_rec, &dz, h_prev);
            outer_add(&mut d_w_in, &dz, &steps[t]);
            carry = vec![0.0; n];
            transpose_apply(&self.w_rec, &dz, &mut carry);
            transpose_apply(&self.w_in, &dz, &mut d_inputs[t]);
        }
        Ok(RnnGradients {
            d_w_rec,
            d_w_in,
            d_inputs,
        })
    }
}

/// Hidden and cell state of an LSTM layer.
#[derive(Clone, Debug)]
pub struct LstmState {
    pub hidden: Vec<f64>,
    pub cell: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden: usize) -> Self {
        LstmState {
            hidden: vec![0.0; hidden],
            cell: vec![0.0; hidden],
        }
    }
}

/// LSTM memory-block layer.
///
/// Gates use the hard sigmoid `clamp(0.2 z + 0.5, 0, 1)`. The cell candidate
/// and the cell squash use `cell_activation` (tanh by default, hard tanh as
/// an option). The candidate term carries no bias; the three gates do.
#[derive(Clone, Debug)]
pub struct LstmLayer {
    pub w_rec_input: Tensor,
    pub w_in_input: Tensor,
    pub bias_input: Tensor,
    pub w_rec_forget: Tensor,
    pub w_in_forget: Tensor,
    pub bias_forget: Tensor,
    pub w_rec_cell: Tensor,
    pub w_in_cell: Tensor,
    pub w_rec_output: Tensor,
    pub w_in_output: Tensor,
    pub bias_output: Tensor,
    pub cell_activation: Activation,
}

/// Per-step values cached for backpropagation through time.
#[derive(Clone, Debug)]
pub struct LstmStepCache {
    pre_input: Vec<f64>,
    pre_forget: Vec<f64>,
    pre_cell: Vec<f64>,
    pre_output: Vec<f64>,
    gate_input: Vec<f64>,
    gate_forget: Vec<f64>,
    gate_output: Vec<f64>,
    candidate: Vec<f64>,
    cell_new: Vec<f64>,
    squashed_cell: Vec<f64>,
}

/// Parameter gradients of an LSTM unrolled over a sequence.
pub struct LstmGradients {
    pub d_w_rec_input: Tensor,
    pub d_w_in_input: Tensor,
    pub d_bias_input: Tensor,
    pub d_w_rec_forget: Tensor,
    pub d_w_in_forget: Tensor,
    pub d_bias_forget: Tensor,
    pub d_w_rec_cell: Tensor,
    pub d_w_in_cell: Tensor,
    pub d_w_rec_output: Tensor,
    pub d_w_in_output: Tensor,
    pub d_bias_output: Tensor,
    pub d_inputs: Vec<Vec<f64>>,
}

impl LstmLayer {
    pub fn zeros(hidden: usize, input_dim: usize, cell_activation: Activation) -> Self {
        let rec = || Tensor::zeros(&[hidden, hidden]);
        let inp = || Tensor::zeros(&[hidden, input_dim]);
        let bias = || Tensor::zeros(&[hidden]);
        LstmLayer {
            w_rec_input: rec(),
            w_in_input: inp(),
            bias_input: bias(),
            w_rec_forget: rec(),
            w_in_forget: inp(),
            bias_forget: bias(),
            w_rec_cell: rec(),
            w_in_cell: inp(),
            w_rec_output: rec(),
            w_in_output: inp(),
            bias_output: bias(),
            cell_activation,
        }
    }

    pub fn hidden_size(&self) -> usize {
        self.w_rec_input.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.w_in_input.cols()
    }

    fn check_shapes(&self, state: &LstmState, x: &[f64]) -> Result<()> {
        let n = self.hidden_size();
        if state.hidden.len() != n || state.cell.len() != n || x.len() != self.input_dim() {
            return Err(Error::shape(format!(
                "lstm step expects hidden {} and input {}, got hidden {} cell {} input {}",
                n,
                self.input_dim(),
                state.hidden.len(),
                state.cell.len(),
                x.len()
            )));
        }
        Ok(())
    }

    pub fn step(&self, state: &LstmState, x: &[f64]) -> Result<LstmState> {
        Ok(self.step_cached(state, x)?.0)
    }

    fn step_cached(&self, state: &LstmState, x: &[f64]) -> Result<(LstmState, LstmStepCache)> {
        self.check_shapes(state, x)?;
        let n = self.hidden_size();
        let h = &state.hidden;
        let gate = Activation::HardSigmoid;

        let pre_input = affine(&self.w_rec_input, &self.w_in_input, Some(&self.bias_input), h, x);
        let pre_forget = affine(&self.w_rec_forget, &self.w_in_forget, Some(&self.bias_forget), h, x);
        let pre_cell = affine(&self.w_rec_cell, &self.w_in_cell, None, h, x);
        let pre_output = affine(&self.w_rec_output, &self.w_in_output, Some(&self.bias_output), h, x);

        let gate_input: Vec<f64> = pre_input.iter().map(|&z| gate.apply(z)).collect();
        let gate_forget: Vec<f64> = pre_forget.iter().map(|&z| gate.apply(z)).collect();
        let gate_output: Vec<f64> = pre_output.iter().map(|&z| gate.apply(z)).collect();
        let candidate: Vec<f64> = pre_cell.iter().map(|&z| self.cell_activation.apply(z)).collect();

        let mut cell_new = vec![0.0; n];
        let mut squashed = vec![0.0; n];
        let mut hidden_new = vec![0.0; n];
        for i in 0..n {
            cell_new[i] = gate_input[i] * candidate[i] + gate_forget[i] * state.cell[i];
            squashed[i] = self.cell_activation.apply(cell_new[i]);
            hidden_new[i] = gate_output[i] * squashed[i];
        }

        let next = LstmState {
            hidden: hidden_new,
            cell: cell_new.clone(),
        };
        let cache = LstmStepCache {
            pre_input,
            pre_forget,
            pre_cell,
            pre_output,
            gate_input,
            gate_forget,
            gate_output,
            candidate,
            cell_new,
            squashed_cell: squashed,
        };
        Ok((next, cache))
    }

    /// Unrolls the layer from a zero initial state.
    pub fn forward_sequence(&self, steps: &[Vec<f64>]) -> Result<(Vec<LstmState>, Vec<LstmStepCache>)> {
        let mut states = Vec::with_capacity(steps.len());
        let mut caches = Vec::with_capacity(steps.len());
        let mut state = LstmState::zeros(self.hidden_size());
        for x in steps {
            let (next, cache) = self.step_cached(&state, x)?;
            states.push(next.clone());
            caches.push(cache);
            state = next;
        }
        Ok((states, caches))
    }

    /// Backpropagation through time over the full sequence. `d_hidden[t]` is
    /// the gradient flowing into `h_t` from outside the recurrence.
    pub fn backward_sequence(
        &self,
        steps: &[Vec<f64>],
        states: &[LstmState],
        caches: &[LstmStepCache],
        d_hidden: &[Vec<f64>],
    ) -> Result<LstmGradients> {
        let n = self.hidden_size();
        let t_len = steps.len();
        if states.len() != t_len || caches.len() != t_len || d_hidden.len() != t_len {
            return Err(Error::shape("lstm backward: sequence lengths differ"));
        }
        let gate = Activation::HardSigmoid;
        let mut grads = LstmGradients {
            d_w_rec_input: Tensor::zeros(&[n, n]),
            d_w_in_input: Tensor::zeros(&[n, self.input_dim()]),
            d_bias_input: Tensor::zeros(&[n]),
            d_w_rec_forget: Tensor::zeros(&[n, n]),
            d_w_in_forget: Tensor::zeros(&[n, self.input_dim()]),
            d_bias_forget: Tensor::zeros(&[n]),
            d_w_rec_cell: Tensor::zeros(&[n, n]),
            d_w_in_cell: Tensor::zeros(&[n, self.input_dim()]),
            d_w_rec_output: Tensor::zeros(&[n, n]),
            d_w_in_output: Tensor::zeros(&[n, self.input_dim()]),
            d_bias_output: Tensor::zeros(&[n]),
            d_inputs: vec![vec![0.0; self.input_dim()]; t_len],
        };
        let zero = LstmState::zeros(n);
        let mut dh_carry = vec![0.0; n];
        let mut dc_carry = vec![0.0; n];
        for t in (0..t_len).rev() {
            let cache = &caches[t];
            let prev = if t == 0 { &zero } else { &states[t - 1] };

            let mut dz_input = vec![0.0; n];
            let mut dz_forget = vec![0.0; n];
            let mut dz_cell = vec![0.0; n];
            let mut dz_output = vec![0.0; n];
            let mut dc_next = vec![0.0; n];
            for i in 0..n {
                let dh = d_hidden[t][i] + dh_carry[i];
                let d_out_gate = dh * cache.squashed_cell[i];
                let dc = dh * cache.gate_output[i] * self.cell_activation.derivative(cache.cell_new[i])
                    + dc_carry[i];
                dz_output[i] = d_out_gate * gate.derivative(cache.pre_output[i]);
                dz_input[i] = dc * cache.candidate[i] * gate.derivative(cache.pre_input[i]);
                dz_cell[i] = dc * cache.gate_input[i] * self.cell_activation.derivative(cache.pre_cell[i]);
                dz_forget[i] = dc * prev.cell[i] * gate.derivative(cache.pre_forget[i]);
                dc_next[i] = dc * cache.gate_forget[i];
            }

            outer_add(&mut grads.d_w_rec_input, &dz_input, &prev.hidden);
            outer_add(&mut grads.d_w_in_input, &dz_input, &steps[t]);
            outer_add(&mut grads.d_w_rec_forget, &dz_forget, &prev.hidden);
            outer_add(&mut grads.d_w_in_forget, &dz_forget, &steps[t]);
            outer_add(&mut grads.d_w_rec_cell, &dz_cell, &prev.hidden);
            outer_add(&mut grads.d_w_in_cell, &dz_cell, &steps[t]);
            outer_add(&mut grads.d_w_rec_output, &dz_output, &prev.hidden);
            outer_add(&mut grads.d_w_in_output, &dz_output, &steps[t]);
            for i in 0..n {
                grads.d_bias_input.data_mut()[i] += dz_input[i];
                grads.d_bias_forget.data_mut()[i] += dz_forget[i];
                grads.d_bias_output.data_mut()[i] += dz_output[i];
            }

            dh_carry = vec![0.0; n];
            transpose_apply(&self.w_rec_input, &dz_input, &mut dh_carry);
            transpose_apply(&self.w_rec_forget, &dz_forget, &mut dh_carry);
            transpose_apply(&self.w_rec_cell, &dz_cell, &mut dh_carry);
            transpose_apply(&self.w_rec_output, &dz_output, &mut dh_carry);
            transpose_apply(&self.w_in_input, &dz_input, &mut grads.d_inputs[t]);
            transpose_apply(&self.w_in_forget, &dz_forget, &mut grads.d_inputs[t]);
            transpose_apply(&self.w_in_cell, &dz_cell, &mut grads.d_inputs[t]);
            transpose_apply(&self.w_in_output, &dz_output, &mut grads.d_inputs[t]);
            dc_carry = dc_next;
        }
        Ok(grads)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rnn_step_with_identity_input_weights() {
        // U=0, V=I, f=relu, x=[2,-1] -> h=[2,0]
        let mut layer = RnnLayer::zeros(2, 2, Activation::Relu);
        *layer.w_in.at_mut(0, 0) = 1.0;
        *layer.w_in.at_mut(1, 1) = 1.0;
        let h = layer.step(&[0.0, 0.0], &[2.0, -1.0]).unwrap();
        assert_eq!(h, vec![2.0, 0.0]);
    }

    #[test]
    fn rnn_step_of_zeros_is_f_of_zero() {
        let layer = RnnLayer::zeros(3, 2, Activation::Tanh);
        let h = layer.step(&[0.0; 3], &[0.0; 2]).unwrap();
        assert_eq!(h, vec![0.0; 3]);
    }

    #[test]
    fn lstm_all_zero_parameters_give_half_gates_and_zero_state() {
        let layer = LstmLayer::zeros(3, 2, Activation::Tanh);
        let (state, cache) = layer
            .step_cached(&LstmState::zeros(3), &[0.4, -1.0])
            .unwrap();
        assert_eq!(cache.gate_input, vec![0.5; 3]);
        assert_eq!(cache.gate_forget, vec![0.5; 3]);
        assert_eq!(cache.gate_output, vec![0.5; 3]);
        assert_eq!(state.cell, vec![0.0; 3]);
        assert_eq!(state.hidden, vec![0.0; 3]);
    }

    #[test]
    fn saturated_forget_gate_carries_cell_exactly() {
        // bias_forget = +50 saturates f to 1; bias_input = -50 saturates i to 0.
        let mut layer = LstmLayer::zeros(2, 1, Activation::Tanh);
        layer.bias_forget.data_mut().fill(50.0);
        layer.bias_input.data_mut().fill(-50.0);
        let prev = LstmState {
            hidden: vec![0.3, -0.2],
            cell: vec![1.25, -0.75],
        };
        let next = layer.step(&prev, &[2.0]).unwrap();
        assert_eq!(next.cell, prev.cell);
    }

    #[test]
    fn lstm_with_zero_output_gate_hides_the_cell() {
        let mut layer = LstmLayer::zeros(2, 1, Activation::Tanh);
        layer.bias_output.data_mut().fill(-50.0);
        layer.bias_input.data_mut().fill(50.0);
        let next = layer.step(&LstmState::zeros(2), &[3.0]).unwrap();
        assert_eq!(next.hidden, vec![0.0, 0.0]);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let layer = RnnLayer::zeros(2, 3, Activation::Relu);
        assert!(layer.step(&[0.0; 2], &[0.0; 2]).is_err());
        let lstm = LstmLayer::zeros(2, 3, Activation::Tanh);
        assert!(lstm.step(&LstmState::zeros(3), &[0.0; 3]).is_err());
    }
}
