//! The five classifier families behind one build/predict interface.
//!
//! Every architecture ends in the same Bernoulli output head; they differ in
//! how the input is transformed first:
//!
//! - `Lr` — no hidden layer, the head reads the input directly
//! - `Mlp` — one fully-connected ReLU hidden layer over the whole input
//! - `Cnn` — wide 1-D convolution (no bias), ReLU, per-map max-pooling
//! - `Rnn` — simple ReLU recurrence over pseudo-sequence slots, mean-pooled
//! - `Lstm` — LSTM memory blocks over pseudo-sequence slots, mean-pooled
//!
//! Dropout, when configured, is applied to the representation entering the
//! head (for LR that is the input itself) during training only.

use crate::dataset::InputRepr;
use crate::error::{Error, Result};
use crate::nn::{
    dropout_backward, dropout_forward, max_pool_backward, max_pool_with_argmax, mean_pool_time,
    mean_pool_time_backward, Activation, Checkpoint, Conv1dLayer, DenseLayer, DropoutMask,
    LstmLayer, LstmState, OutputHead, RnnLayer,
};
use crate::nn::pool::pooled_len;
use crate::nn::recurrent::LstmStepCache;
use crate::tensor::Tensor;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Architecture choice with its architecture-specific hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "arch", rename_all = "lowercase")]
pub enum ArchSpec {
    Lr,
    Mlp { hidden: usize },
    Cnn { filters: usize, filter_len: usize, pool_len: usize },
    Rnn { hidden: usize },
    Lstm { hidden: usize, hard_tanh: bool },
}

impl ArchSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ArchSpec::Lr => "lr",
            ArchSpec::Mlp { .. } => "mlp",
            ArchSpec::Cnn { .. } => "cnn",
            ArchSpec::Rnn { .. } => "rnn",
            ArchSpec::Lstm { .. } => "lstm",
        }
    }
}

/// A complete model description: architecture, input representation and the
/// training-time knobs that belong to the model (dropout rate, minibatch).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub arch: ArchSpec,
    pub input_repr: InputRepr,
    /// Flat input vector length (4 for intensity features, padded length
    /// otherwise; for pseudo-sequences a multiple of `slot_width`).
    pub input_len: usize,
    /// Pseudo-sequence slot width S; ignored by non-recurrent models.
    pub slot_width: usize,
    pub dropout: f64,
    pub minibatch: usize,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.input_len == 0 {
            return Err(Error::invalid("input_len must be positive"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::invalid(format!("dropout must be in [0,1), got {}", self.dropout)));
        }
        if self.minibatch == 0 {
            return Err(Error::invalid("minibatch must be at least 1"));
        }
        let repr_ok = match self.arch {
            ArchSpec::Lr | ArchSpec::Mlp { .. } => {
                matches!(self.input_repr, InputRepr::Intensity4 | InputRepr::RawPadded)
            }
            ArchSpec::Cnn { .. } => matches!(self.input_repr, InputRepr::RawPadded),
            ArchSpec::Rnn { .. } | ArchSpec::Lstm { .. } => {
                matches!(self.input_repr, InputRepr::PseudoSeq)
            }
        };
        if !repr_ok {
            return Err(Error::invalid(format!(
                "architecture {} cannot consume representation {}",
                self.arch.name(),
                self.input_repr
            )));
        }
        match self.arch {
            ArchSpec::Mlp { hidden } if hidden == 0 => {
                return Err(Error::invalid("mlp hidden size must be positive"))
            }
            ArchSpec::Cnn { filters, filter_len, pool_len } => {
                if filters == 0 || filter_len == 0 || pool_len == 0 {
                    return Err(Error::invalid("cnn filters, filter_len and pool_len must be positive"));
                }
            }
            ArchSpec::Rnn { hidden } | ArchSpec::Lstm { hidden, .. } if hidden == 0 => {
                return Err(Error::invalid("recurrent hidden size must be positive"))
            }
            _ => {}
        }
        if matches!(self.input_repr, InputRepr::PseudoSeq) {
            if self.slot_width == 0 {
                return Err(Error::invalid("slot width must be positive"));
            }
            if self.input_len % self.slot_width != 0 {
                return Err(Error::invalid(format!(
                    "input_len {} is not a multiple of slot width {}",
                    self.input_len, self.slot_width
                )));
            }
        }
        Ok(())
    }

    fn head_input_dim(&self) -> usize {
        match self.arch {
            ArchSpec::Lr => self.input_len,
            ArchSpec::Mlp { hidden } => hidden,
            ArchSpec::Cnn { filters, filter_len, pool_len } => {
                filters * pooled_len(self.input_len + filter_len - 1, pool_len)
            }
            ArchSpec::Rnn { hidden } => hidden,
            ArchSpec::Lstm { hidden, .. } => hidden,
        }
    }
}

/// Weight initialization scheme. Zero is the default; it leaves the hidden
/// units of MLP/CNN permutation-symmetric (they receive no gradient through
/// a zero head), which the small uniform scheme avoids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitScheme {
    Zero,
    SmallUniform,
}

impl std::str::FromStr for InitScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "zero" => Ok(InitScheme::Zero),
            "small_uniform" | "uniform" => Ok(InitScheme::SmallUniform),
            other => Err(Error::invalid(format!("unknown init scheme `{other}`"))),
        }
    }
}

const INIT_RANGE: f64 = 0.05;

#[derive(Clone, Debug)]
enum Params {
    Lr { head: OutputHead },
    Mlp { hidden: DenseLayer, head: OutputHead },
    Cnn { conv: Conv1dLayer, head: OutputHead },
    Rnn { rnn: RnnLayer, head: OutputHead },
    Lstm { lstm: LstmLayer, head: OutputHead },
}

/// A built model: spec plus parameters.
#[derive(Clone, Debug)]
pub struct Model {
    pub spec: ModelSpec,
    params: Params,
}

/// Gradient tensors aligned one-to-one with [`Model::param_tensors`].
#[derive(Clone, Debug)]
pub struct Gradients(pub Vec<Tensor>);

impl Gradients {
    pub fn zeros_like(model: &Model) -> Self {
        Gradients(
            model
                .param_tensors()
                .iter()
                .map(|(_, t)| Tensor::zeros(t.shape()))
                .collect(),
        )
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        debug_assert_eq!(self.0.len(), other.0.len());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            for (x, y) in a.data_mut().iter_mut().zip(b.data()) {
                *x += y;
            }
        }
    }

    pub fn has_non_finite(&self) -> bool {
        self.0.iter().any(Tensor::has_non_finite)
    }
}

/// Cached forward-pass values needed by the backward pass.
pub struct ForwardCache {
    prob: f64,
    detail: CacheDetail,
    mask: Option<DropoutMask>,
    /// Head input after dropout.
    features: Vec<f64>,
}

impl ForwardCache {
    pub fn prob(&self) -> f64 {
        self.prob
    }
}

enum CacheDetail {
    Lr,
    Mlp {
        hidden_pre: Vec<f64>,
    },
    Cnn {
        pre_maps: Tensor,
        argmax: Vec<Vec<usize>>,
        pooled_per_map: usize,
    },
    Rnn {
        steps: Vec<Vec<f64>>,
        states: Vec<Vec<f64>>,
        pres: Vec<Vec<f64>>,
    },
    Lstm {
        steps: Vec<Vec<f64>>,
        states: Vec<LstmState>,
        caches: Vec<LstmStepCache>,
    },
}

impl Model {
    /// Builds a model with the given initialization. The parameter layout is
    /// a pure function of the spec.
    pub fn build(spec: &ModelSpec, init: InitScheme, seed: u64) -> Result<Model> {
        spec.validate()?;
        let head_dim = spec.head_input_dim();
        let params = match spec.arch {
            ArchSpec::Lr => Params::Lr {
                head: OutputHead::zeros(head_dim),
            },
            ArchSpec::Mlp { hidden } => Params::Mlp {
                hidden: DenseLayer::zeros(spec.input_len, hidden, Activation::Relu),
                head: OutputHead::zeros(head_dim),
            },
            ArchSpec::Cnn { filters, filter_len, .. } => Params::Cnn {
                conv: Conv1dLayer::zeros(filters, filter_len, 1, Activation::Relu),
                head: OutputHead::zeros(head_dim),
            },
            ArchSpec::Rnn { hidden } => Params::Rnn {
                rnn: RnnLayer::zeros(hidden, spec.slot_width, Activation::Relu),
                head: OutputHead::zeros(head_dim),
            },
            ArchSpec::Lstm { hidden, hard_tanh } => Params::Lstm {
                lstm: LstmLayer::zeros(
                    hidden,
                    spec.slot_width,
                    if hard_tanh { Activation::HardTanh } else { Activation::Tanh },
                ),
                head: OutputHead::zeros(head_dim),
            },
        };
        let mut model = Model {
            spec: spec.clone(),
            params,
        };
        if init == InitScheme::SmallUniform {
            let mut rng = crate::rng::stream(seed, "init", 0);
            for (name, tensor) in model.param_tensors_mut() {
                // weights only; biases stay zero
                if !name.ends_with("bias") {
                    tensor.fill_uniform(&mut rng, -INIT_RANGE, INIT_RANGE);
                }
            }
        }
        Ok(model)
    }

    /// Total number of scalar parameters.
    pub fn parameter_count(&self) -> usize {
        self.param_tensors().iter().map(|(_, t)| t.len()).sum()
    }

    /// Named views of every parameter tensor, in a stable order.
    pub fn param_tensors(&self) -> Vec<(&'static str, &Tensor)> {
        match &self.params {
            Params::Lr { head } => vec![("head.weights", &head.weights), ("head.bias", &head.bias)],
            Params::Mlp { hidden, head } => vec![
                ("hidden.weights", &hidden.weights),
                ("hidden.bias", &hidden.bias),
                ("head.weights", &head.weights),
                ("head.bias", &head.bias),
            ],
            Params::Cnn { conv, head } => vec![
                ("conv.filters", &conv.filters),
                ("head.weights", &head.weights),
                ("head.bias", &head.bias),
            ],
            Params::Rnn { rnn, head } => vec![
                ("rnn.w_rec", &rnn.w_rec),
                ("rnn.w_in", &rnn.w_in),
                ("head.weights", &head.weights),
                ("head.bias", &head.bias),
            ],
            Params::Lstm { lstm, head } => vec![
                ("lstm.input.w_rec", &lstm.w_rec_input),
                ("lstm.input.w_in", &lstm.w_in_input),
                ("lstm.input.bias", &lstm.bias_input),
                ("lstm.forget.w_rec", &lstm.w_rec_forget),
                ("lstm.forget.w_in", &lstm.w_in_forget),
                ("lstm.forget.bias", &lstm.bias_forget),
                ("lstm.cell.w_rec", &lstm.w_rec_cell),
                ("lstm.cell.w_in", &lstm.w_in_cell),
                ("lstm.output.w_rec", &lstm.w_rec_output),
                ("lstm.output.w_in", &lstm.w_in_output),
                ("lstm.output.bias", &lstm.bias_output),
                ("head.weights", &head.weights),
                ("head.bias", &head.bias),
            ],
        }
    }

    pub fn param_tensors_mut(&mut self) -> Vec<(&'static str, &mut Tensor)> {
        match &mut self.params {
            Params::Lr { head } => vec![("head.weights", &mut head.weights), ("head.bias", &mut head.bias)],
            Params::Mlp { hidden, head } => vec![
                ("hidden.weights", &mut hidden.weights),
                ("hidden.bias", &mut hidden.bias),
                ("head.weights", &mut head.weights),
                ("head.bias", &mut head.bias),
            ],
            Params::Cnn { conv, head } => vec![
                ("conv.filters", &mut conv.filters),
                ("head.weights", &mut head.weights),
                ("head.bias", &mut head.bias),
            ],
            Params::Rnn { rnn, head } => vec![
                ("rnn.w_rec", &mut rnn.w_rec),
                ("rnn.w_in", &mut rnn.w_in),
                ("head.weights", &mut head.weights),
                ("head.bias", &mut head.bias),
            ],
            Params::Lstm { lstm, head } => vec![
                ("lstm.input.w_rec", &mut lstm.w_rec_input),
                ("lstm.input.w_in", &mut lstm.w_in_input),
                ("lstm.input.bias", &mut lstm.bias_input),
                ("lstm.forget.w_rec", &mut lstm.w_rec_forget),
                ("lstm.forget.w_in", &mut lstm.w_in_forget),
                ("lstm.forget.bias", &mut lstm.bias_forget),
                ("lstm.cell.w_rec", &mut lstm.w_rec_cell),
                ("lstm.cell.w_in", &mut lstm.w_in_cell),
                ("lstm.output.w_rec", &mut lstm.w_rec_output),
                ("lstm.output.w_in", &mut lstm.w_in_output),
                ("lstm.output.bias", &mut lstm.bias_output),
                ("head.weights", &mut head.weights),
                ("head.bias", &mut head.bias),
            ],
        }
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.spec.input_len {
            return Err(Error::shape(format!(
                "{} expects input of {} values, got {}",
                self.spec.arch.name(),
                self.spec.input_len,
                input.len()
            )));
        }
        Ok(())
    }

    fn slots(&self, input: &[f64]) -> Vec<Vec<f64>> {
        input
            .chunks(self.spec.slot_width)
            .map(<[f64]>::to_vec)
            .collect()
    }

    /// Probability of Good at inference time: dropout off, deterministic.
    pub fn predict(&self, input: &[f64]) -> Result<f64> {
        Ok(self
            .forward_internal::<rand_chacha::ChaCha8Rng>(input, None)?
            .prob)
    }

    /// Training-mode forward pass with dropout driven by `rng`.
    pub fn forward_train<R: Rng>(&self, input: &[f64], rng: &mut R) -> Result<ForwardCache> {
        self.forward_internal(input, Some(rng))
    }

    fn forward_internal<R: Rng>(&self, input: &[f64], mut rng: Option<&mut R>) -> Result<ForwardCache> {
        self.check_input(input)?;
        let (representation, detail) = match &self.params {
            Params::Lr { .. } => (input.to_vec(), CacheDetail::Lr),
            Params::Mlp { hidden, .. } => {
                let (out, pre) = hidden.forward_cached(input)?;
                (out, CacheDetail::Mlp { hidden_pre: pre })
            }
            Params::Cnn { conv, .. } => {
                let ArchSpec::Cnn { pool_len, .. } = self.spec.arch else {
                    unreachable!()
                };
                let (maps, pre_maps) = conv.forward_cached(input)?;
                let map_len = conv.map_len(self.spec.input_len);
                let per_map = pooled_len(map_len, pool_len);
                let mut pooled = Vec::with_capacity(conv.n_filters() * per_map);
                let mut argmax = Vec::with_capacity(conv.n_filters());
                for f in 0..conv.n_filters() {
                    let row = &maps.data()[f * map_len..(f + 1) * map_len];
                    let (p, a) = max_pool_with_argmax(row, pool_len)?;
                    pooled.extend(p);
                    argmax.push(a);
                }
                (
                    pooled,
                    CacheDetail::Cnn {
                        pre_maps,
                        argmax,
                        pooled_per_map: per_map,
                    },
                )
            }
            Params::Rnn { rnn, .. } => {
                let steps = self.slots(input);
                let (states, pres) = rnn.forward_sequence(&steps)?;
                let pooled = mean_pool_time(&states)?;
                (pooled, CacheDetail::Rnn { steps, states, pres })
            }
            Params::Lstm { lstm, .. } => {
                let steps = self.slots(input);
                let (states, caches) = lstm.forward_sequence(&steps)?;
                let hiddens: Vec<Vec<f64>> = states.iter().map(|s| s.hidden.clone()).collect();
                let pooled = mean_pool_time(&hiddens)?;
                (pooled, CacheDetail::Lstm { steps, states, caches })
            }
        };

        let (features, mask) = match rng.as_deref_mut() {
            Some(r) => dropout_forward(&representation, self.spec.dropout, r, true)?,
            None => (representation, None),
        };
        let head = self.head();
        let prob = head.predict(&features)?;
        Ok(ForwardCache {
            prob,
            detail,
            mask,
            features,
        })
    }

    fn head(&self) -> &OutputHead {
        match &self.params {
            Params::Lr { head }
            | Params::Mlp { head, .. }
            | Params::Cnn { head, .. }
            | Params::Rnn { head, .. }
            | Params::Lstm { head, .. } => head,
        }
    }

    /// Backward pass for one example; gradients of the summed cross-entropy
    /// loss, aligned with [`Model::param_tensors`].
    pub fn backward(&self, input: &[f64], cache: &ForwardCache, label: f64) -> Result<Gradients> {
        self.check_input(input)?;
        let head = self.head();
        let (d_features, d_head_w, d_head_b) = head.backward(&cache.features, cache.prob, label)?;
        let d_repr = match &cache.mask {
            Some(mask) => dropout_backward(&d_features, mask),
            None => d_features,
        };

        let tensors = match (&self.params, &cache.detail) {
            (Params::Lr { .. }, CacheDetail::Lr) => vec![d_head_w, d_head_b],
            (Params::Mlp { hidden, .. }, CacheDetail::Mlp { hidden_pre, .. }) => {
                let (_, d_w, d_b) = hidden.backward(input, hidden_pre, &d_repr)?;
                vec![d_w, d_b, d_head_w, d_head_b]
            }
            (
                Params::Cnn { conv, .. },
                CacheDetail::Cnn {
                    pre_maps,
                    argmax,
                    pooled_per_map,
                },
            ) => {
                let map_len = conv.map_len(self.spec.input_len);
                let mut d_maps = Tensor::zeros(&[conv.n_filters(), map_len]);
                for f in 0..conv.n_filters() {
                    let d_pooled = &d_repr[f * pooled_per_map..(f + 1) * pooled_per_map];
                    let d_row = max_pool_backward(d_pooled, &argmax[f], map_len);
                    d_maps.data_mut()[f * map_len..(f + 1) * map_len].copy_from_slice(&d_row);
                }
                let (_, d_filters) = conv.backward(input, pre_maps, &d_maps)?;
                vec![d_filters, d_head_w, d_head_b]
            }
            (Params::Rnn { rnn, .. }, CacheDetail::Rnn { steps, states, pres }) => {
                let d_states = mean_pool_time_backward(&d_repr, steps.len());
                let grads = rnn.backward_sequence(steps, states, pres, &d_states)?;
                vec![grads.d_w_rec, grads.d_w_in, d_head_w, d_head_b]
            }
            (Params::Lstm { lstm, .. }, CacheDetail::Lstm { steps, states, caches }) => {
                let d_hidden = mean_pool_time_backward(&d_repr, steps.len());
                let g = lstm.backward_sequence(steps, states, caches, &d_hidden)?;
                vec![
                    g.d_w_rec_input,
                    g.d_w_in_input,
                    g.d_bias_input,
                    g.d_w_rec_forget,
                    g.d_w_in_forget,
                    g.d_bias_forget,
                    g.d_w_rec_cell,
                    g.d_w_in_cell,
                    g.d_w_rec_output,
                    g.d_w_in_output,
                    g.d_bias_output,
                    d_head_w,
                    d_head_b,
                ]
            }
            _ => return Err(Error::invalid("forward cache does not match this model")),
        };
        Ok(Gradients(tensors))
    }

    /// Saves the model to the versioned checkpoint container; the round trip
    /// is bit-exact.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let meta = serde_json::to_value(&self.spec).map_err(|e| Error::Format(e.to_string()))?;
        let mut cp = Checkpoint::new("model", meta);
        for (name, tensor) in self.param_tensors() {
            cp.push(name, tensor.clone());
        }
        cp.save_to_path(path)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Model> {
        let cp = Checkpoint::load_from_path(path)?;
        if cp.kind != "model" {
            return Err(Error::Format(format!("checkpoint kind `{}` is not a model", cp.kind)));
        }
        let spec: ModelSpec =
            serde_json::from_value(cp.meta.clone()).map_err(|e| Error::Format(e.to_string()))?;
        let mut model = Model::build(&spec, InitScheme::Zero, 0)?;
        for (name, tensor) in model.param_tensors_mut() {
            let stored = cp.tensor(name)?;
            if stored.shape() != tensor.shape() {
                return Err(Error::Format(format!(
                    "tensor `{name}` has shape {:?}, expected {:?}",
                    stored.shape(),
                    tensor.shape()
                )));
            }
            tensor.data_mut().copy_from_slice(stored.data());
        }
        Ok(model)
    }
}
