//! RMSprop optimization, the minibatch training loop with early stopping,
//! and grid search over the hyperparameter spaces.

use crate::dataset::{InputRepr, PreparedData, ReprConfig, SmoteParams};
use crate::error::{Error, Result};
use crate::eval::{evaluate, roc_curve, EvalReport};
use crate::models::{ArchSpec, Gradients, InitScheme, Model, ModelSpec};
use crate::rng::{derive_seed, stream};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

/// RMSprop hyperparameters; the defaults are the values suggested by the
/// algorithm's authors (lr 0.001, rho 0.9, epsilon 1e-8).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RmspropConfig {
    pub learning_rate: f64,
    pub rho: f64,
    pub epsilon: f64,
}

impl Default for RmspropConfig {
    fn default() -> Self {
        RmspropConfig {
            learning_rate: 0.001,
            rho: 0.9,
            epsilon: 1e-8,
        }
    }
}

impl RmspropConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.rho && self.rho < 1.0) {
            return Err(Error::invalid(format!("rho must be in (0,1), got {}", self.rho)));
        }
        if self.epsilon <= 0.0 || self.learning_rate <= 0.0 {
            return Err(Error::invalid("learning rate and epsilon must be positive"));
        }
        Ok(())
    }
}

/// Per-parameter running mean of squared gradients plus the update rule
/// `acc <- rho acc + (1-rho) g^2; theta <- theta - lr g / sqrt(acc + eps)`.
pub struct Rmsprop {
    cfg: RmspropConfig,
    accumulators: Vec<crate::tensor::Tensor>,
}

impl Rmsprop {
    pub fn new(cfg: RmspropConfig, model: &Model) -> Result<Self> {
        cfg.validate()?;
        Ok(Rmsprop {
            cfg,
            accumulators: model
                .param_tensors()
                .iter()
                .map(|(_, t)| crate::tensor::Tensor::zeros(t.shape()))
                .collect(),
        })
    }

    /// One update step. A NaN or infinite gradient aborts with diagnostics
    /// naming the offending parameter tensor.
    pub fn step(&mut self, model: &mut Model, grads: &Gradients) -> Result<()> {
        let params = model.param_tensors_mut();
        if params.len() != grads.0.len() || params.len() != self.accumulators.len() {
            return Err(Error::shape("optimizer state does not match the model"));
        }
        for ((name, param), (acc, grad)) in params
            .into_iter()
            .zip(self.accumulators.iter_mut().zip(&grads.0))
        {
            if grad.has_non_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite gradient in `{name}` (shape {:?})",
                    grad.shape()
                )));
            }
            let lr = self.cfg.learning_rate;
            let rho = self.cfg.rho;
            let eps = self.cfg.epsilon;
            for ((p, a), &g) in param
                .data_mut()
                .iter_mut()
                .zip(acc.data_mut())
                .zip(grad.data())
            {
                *a = rho * *a + (1.0 - rho) * g * g;
                *p -= lr * g / (*a + eps).sqrt();
            }
        }
        Ok(())
    }
}

/// Training-loop settings. Minibatch size and dropout rate live in the
/// [`ModelSpec`]; everything here is architecture-independent.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TrainConfig {
    pub max_epochs: usize,
    /// Early stopping: halt after this many epochs without a new best
    /// validation loss.
    pub patience: usize,
    pub seed: u64,
    pub init: InitScheme,
    pub optimizer: RmspropConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_epochs: 50,
            patience: 5,
            seed: 0,
            init: InitScheme::Zero,
            optimizer: RmspropConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Summed cross-entropy over the training pass (dropout active).
    pub train_loss: f64,
    /// Summed cross-entropy over the validation partition (dropout off).
    pub val_loss: f64,
}

pub struct TrainOutcome {
    /// The best-validation checkpoint, not the last epoch's weights.
    pub model: Model,
    pub history: Vec<EpochStats>,
    pub best_epoch: usize,
    pub best_val_loss: f64,
}

fn validation_loss(model: &Model, inputs: &[Vec<f64>], labels: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (x, &y) in inputs.iter().zip(labels) {
        let p = model.predict(x)?;
        total += crate::nn::cross_entropy(p, y).0;
    }
    Ok(total)
}

/// Scores every input with the model.
pub fn score_all(model: &Model, inputs: &[Vec<f64>]) -> Result<Vec<f64>> {
    inputs.iter().map(|x| model.predict(x)).collect()
}

/// Trains one model: seeded shuffled minibatches, RMSprop updates, early
/// stopping on validation loss, returning the best-validation checkpoint.
pub fn train(spec: &ModelSpec, data: &PreparedData, cfg: &TrainConfig) -> Result<TrainOutcome> {
    if data.train_inputs.is_empty() || data.val_inputs.is_empty() {
        return Err(Error::invalid("train and validation partitions must be non-empty"));
    }
    if data.input_len != spec.input_len {
        return Err(Error::shape(format!(
            "prepared data carries {}-long inputs but the spec expects {}",
            data.input_len, spec.input_len
        )));
    }
    let mut model = Model::build(spec, cfg.init, cfg.seed)?;
    let mut optimizer = Rmsprop::new(cfg.optimizer, &model)?;

    let mut best_model = model.clone();
    let mut best_val = f64::INFINITY;
    let mut best_epoch = 0;
    let mut since_improvement = 0usize;
    let mut history = Vec::new();

    let n = data.train_inputs.len();
    for epoch in 1..=cfg.max_epochs {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut stream(cfg.seed, "shuffle", epoch as u64));
        let mut dropout_rng = stream(cfg.seed, "dropout", epoch as u64);

        let mut train_loss = 0.0;
        for batch in order.chunks(spec.minibatch) {
            let mut grads = Gradients::zeros_like(&model);
            for &idx in batch {
                let x = &data.train_inputs[idx];
                let y = data.train_labels[idx];
                let fwd = model.forward_train(x, &mut dropout_rng)?;
                train_loss += crate::nn::cross_entropy(fwd.prob(), y).0;
                let g = model.backward(x, &fwd, y)?;
                grads.add_assign(&g);
            }
            optimizer.step(&mut model, &grads)?;
        }

        let val_loss = validation_loss(&model, &data.val_inputs, &data.val_labels)?;
        if !train_loss.is_finite() || !val_loss.is_finite() {
            return Err(Error::Numeric(format!(
                "loss diverged at epoch {epoch} (train {train_loss}, val {val_loss})"
            )));
        }
        history.push(EpochStats {
            epoch,
            train_loss,
            val_loss,
        });

        if val_loss < best_val {
            best_val = val_loss;
            best_model = model.clone();
            best_epoch = epoch;
            since_improvement = 0;
        } else {
            since_improvement += 1;
            if since_improvement > cfg.patience {
                break;
            }
        }
    }

    Ok(TrainOutcome {
        model: best_model,
        history,
        best_epoch,
        best_val_loss: best_val,
    })
}

/// Per-architecture hyperparameter axes, defaulting to the studied spaces.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridSpec {
    pub hidden: Vec<usize>,
    pub filters: Vec<usize>,
    pub filter_len: Vec<usize>,
    pub pool_len: Vec<usize>,
    pub recurrent_units: Vec<usize>,
    pub slot_width: Vec<usize>,
    pub dropout: Vec<f64>,
    pub minibatch: Vec<usize>,
    #[serde(default)]
    pub hard_tanh: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            hidden: vec![2, 3, 5, 10, 15, 20],
            filters: vec![25, 50, 75, 100, 125, 150],
            filter_len: vec![2, 3, 4, 5],
            pool_len: vec![2, 3, 4, 5],
            recurrent_units: vec![25, 50, 75, 85, 100],
            slot_width: vec![25, 50, 75, 100],
            dropout: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            minibatch: vec![5, 10, 15, 20],
            hard_tanh: false,
        }
    }
}

/// Architecture family without its hyperparameters, for grid expansion and
/// the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchFamily {
    Lr,
    Mlp,
    Cnn,
    Rnn,
    Lstm,
}

impl ArchFamily {
    pub const ALL: [ArchFamily; 5] = [
        ArchFamily::Lr,
        ArchFamily::Mlp,
        ArchFamily::Cnn,
        ArchFamily::Rnn,
        ArchFamily::Lstm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ArchFamily::Lr => "lr",
            ArchFamily::Mlp => "mlp",
            ArchFamily::Cnn => "cnn",
            ArchFamily::Rnn => "rnn",
            ArchFamily::Lstm => "lstm",
        }
    }

    /// The representation each family consumes by default: raw padded
    /// sequences for LR/MLP/CNN, pseudo-sequences for the recurrent models.
    pub fn default_repr(self) -> InputRepr {
        match self {
            ArchFamily::Lr | ArchFamily::Mlp | ArchFamily::Cnn => InputRepr::RawPadded,
            ArchFamily::Rnn | ArchFamily::Lstm => InputRepr::PseudoSeq,
        }
    }
}

impl std::fmt::Display for ArchFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl std::str::FromStr for ArchFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lr" => Ok(ArchFamily::Lr),
            "mlp" => Ok(ArchFamily::Mlp),
            "cnn" => Ok(ArchFamily::Cnn),
            "rnn" => Ok(ArchFamily::Rnn),
            "lstm" => Ok(ArchFamily::Lstm),
            other => Err(Error::invalid(format!("unknown architecture `{other}`"))),
        }
    }
}

impl GridSpec {
    /// Expands the Cartesian product of the axes relevant to `family`.
    /// `repr` fixes the representation; `target_len` sizes the padded input
    /// (pseudo-sequence specs round it up to a slot multiple).
    pub fn expand(&self, family: ArchFamily, repr: InputRepr, target_len: usize) -> Result<Vec<ModelSpec>> {
        let make = |arch: ArchSpec, slot_width: usize, dropout: f64, minibatch: usize| -> ModelSpec {
            let input_len = match repr {
                InputRepr::Intensity4 => 4,
                InputRepr::RawPadded => target_len,
                InputRepr::PseudoSeq => target_len.div_ceil(slot_width) * slot_width,
            };
            ModelSpec {
                arch,
                input_repr: repr,
                input_len,
                slot_width,
                dropout,
                minibatch,
            }
        };
        let mut specs = Vec::new();
        for &dr in &self.dropout {
            for &mb in &self.minibatch {
                match family {
                    ArchFamily::Lr => specs.push(make(ArchSpec::Lr, 1, dr, mb)),
                    ArchFamily::Mlp => {
                        for &h in &self.hidden {
                            specs.push(make(ArchSpec::Mlp { hidden: h }, 1, dr, mb));
                        }
                    }
                    ArchFamily::Cnn => {
                        for &nf in &self.filters {
                            for &fl in &self.filter_len {
                                for &pl in &self.pool_len {
                                    specs.push(make(
                                        ArchSpec::Cnn { filters: nf, filter_len: fl, pool_len: pl },
                                        1,
                                        dr,
                                        mb,
                                    ));
                                }
                            }
                        }
                    }
                    ArchFamily::Rnn => {
                        for &h in &self.recurrent_units {
                            for &s in &self.slot_width {
                                specs.push(make(ArchSpec::Rnn { hidden: h }, s, dr, mb));
                            }
                        }
                    }
                    ArchFamily::Lstm => {
                        for &h in &self.recurrent_units {
                            for &s in &self.slot_width {
                                specs.push(make(
                                    ArchSpec::Lstm { hidden: h, hard_tanh: self.hard_tanh },
                                    s,
                                    dr,
                                    mb,
                                ));
                            }
                        }
                    }
                }
            }
        }
        if specs.is_empty() {
            return Err(Error::invalid("grid expansion is empty"));
        }
        Ok(specs)
    }
}

/// One grid point with its validation results.
#[derive(Clone, Debug)]
pub struct GridCandidate {
    pub spec: ModelSpec,
    pub val_auc: f64,
    pub val_loss: f64,
    pub best_epoch: usize,
}

pub struct GridOutcome {
    /// All candidates, best validation AUC first.
    pub ranked: Vec<GridCandidate>,
    /// Trained best-validation model of the winning configuration.
    pub winner: TrainOutcome,
    /// Test metrics, computed for the winner only.
    pub winner_test: EvalReport,
}

/// Data provider for grid search: pseudo-sequence candidates need a
/// different vectorization per slot width, so data is prepared per width.
pub struct GridData<'a> {
    split: &'a crate::dataset::DatasetSplit,
    base_repr: ReprConfig,
    smote: Option<SmoteParams>,
}

impl<'a> GridData<'a> {
    pub fn new(split: &'a crate::dataset::DatasetSplit, base_repr: ReprConfig, smote: Option<SmoteParams>) -> Self {
        GridData {
            split,
            base_repr,
            smote,
        }
    }

    fn prepare_for(&self, spec: &ModelSpec) -> Result<PreparedData> {
        let mut repr = self.base_repr.clone();
        repr.kind = spec.input_repr;
        repr.slot_width = spec.slot_width;
        crate::dataset::prepare(self.split, &repr, self.smote)
    }
}

/// Trains every grid point with the identical seed protocol and ranks the
/// configurations by validation AUC (ties: lower validation loss, then grid
/// order). Test metrics are computed for the winner only.
pub fn grid_search(
    family: ArchFamily,
    grid: &GridSpec,
    data: &GridData,
    train_cfg: &TrainConfig,
    jobs: usize,
) -> Result<GridOutcome> {
    let repr = data.base_repr.kind;
    let specs = grid.expand(family, repr, data.base_repr.target_len)?;

    let run_one = |spec: &ModelSpec| -> Result<(GridCandidate, TrainOutcome)> {
        let prepared = data.prepare_for(spec)?;
        let outcome = train(spec, &prepared, train_cfg)?;
        let scores = score_all(&outcome.model, &prepared.val_inputs)?;
        let labels: Vec<bool> = prepared.val_labels.iter().map(|&y| y > 0.5).collect();
        let (_, val_auc) = roc_curve(&scores, &labels)?;
        Ok((
            GridCandidate {
                spec: spec.clone(),
                val_auc,
                val_loss: outcome.best_val_loss,
                best_epoch: outcome.best_epoch,
            },
            outcome,
        ))
    };

    let results: Vec<Result<(GridCandidate, TrainOutcome)>> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::invalid(format!("cannot build thread pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            specs.par_iter().map(run_one).collect()
        })
    } else {
        specs.iter().map(run_one).collect()
    };

    let mut outcomes = Vec::with_capacity(results.len());
    for r in results {
        outcomes.push(r?);
    }

    let mut order: Vec<usize> = (0..outcomes.len()).collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (&outcomes[a].0, &outcomes[b].0);
        cb.val_auc
            .partial_cmp(&ca.val_auc)
            .unwrap()
            .then(ca.val_loss.partial_cmp(&cb.val_loss).unwrap())
            .then(a.cmp(&b))
    });

    let winner_idx = order[0];
    let ranked: Vec<GridCandidate> = order.iter().map(|&i| outcomes[i].0.clone()).collect();
    let winner_spec = outcomes[winner_idx].0.spec.clone();
    let winner = outcomes.swap_remove(winner_idx).1;

    let prepared = data.prepare_for(&winner_spec)?;
    let test_scores = score_all(&winner.model, &prepared.test_inputs)?;
    let test_labels: Vec<bool> = prepared.test_labels.iter().map(|&y| y > 0.5).collect();
    let winner_test = evaluate(&test_scores, &test_labels, 0.5)?;

    Ok(GridOutcome {
        ranked,
        winner,
        winner_test,
    })
}

/// Convenience: derive the per-stage seed for SMOTE from a root seed.
pub fn smote_seed(root: u64) -> u64 {
    derive_seed(root, "smote", 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::InputRepr;

    fn toy_data(n_per_class: usize) -> PreparedData {
        // linearly separable in 2 features
        let mut train_inputs = Vec::new();
        let mut train_labels = Vec::new();
        for i in 0..n_per_class {
            let jitter = i as f64 * 0.01;
            train_inputs.push(vec![1.0 + jitter, 0.1]);
            train_labels.push(1.0);
            train_inputs.push(vec![-1.0 - jitter, -0.1]);
            train_labels.push(0.0);
        }
        PreparedData {
            val_inputs: train_inputs.clone(),
            val_labels: train_labels.clone(),
            test_inputs: train_inputs.clone(),
            test_labels: train_labels.clone(),
            train_inputs,
            train_labels,
            input_len: 2,
        }
    }

    fn lr_spec() -> ModelSpec {
        ModelSpec {
            arch: ArchSpec::Lr,
            input_repr: InputRepr::RawPadded,
            input_len: 2,
            slot_width: 1,
            dropout: 0.0,
            minibatch: 5,
        }
    }

    #[test]
    fn rmsprop_zero_gradient_leaves_parameters_alone() {
        let spec = lr_spec();
        let mut model = Model::build(&spec, InitScheme::SmallUniform, 1).unwrap();
        let before: Vec<f64> = model.param_tensors().iter().flat_map(|(_, t)| t.data().to_vec()).collect();
        let grads = Gradients::zeros_like(&model);
        let mut opt = Rmsprop::new(RmspropConfig::default(), &model).unwrap();
        opt.step(&mut model, &grads).unwrap();
        let after: Vec<f64> = model.param_tensors().iter().flat_map(|(_, t)| t.data().to_vec()).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn rmsprop_first_step_matches_hand_evaluated_update() {
        // one scalar parameter, gradient g: delta = -lr*g/sqrt(0.1 g^2 + eps)
        let spec = ModelSpec {
            input_len: 1,
            ..lr_spec()
        };
        let mut model = Model::build(&spec, InitScheme::Zero, 0).unwrap();
        let g = 0.37;
        let mut grads = Gradients::zeros_like(&model);
        grads.0[0].data_mut()[0] = g;
        let mut opt = Rmsprop::new(RmspropConfig::default(), &model).unwrap();
        opt.step(&mut model, &grads).unwrap();
        let expected = -0.001 * g / (0.1 * g * g + 1e-8).sqrt();
        let got = model.param_tensors()[0].1.data()[0];
        assert!((got - expected).abs() < 1e-15, "{got} vs {expected}");
    }

    #[test]
    fn rmsprop_second_identical_step_is_smaller() {
        let spec = ModelSpec {
            input_len: 1,
            ..lr_spec()
        };
        let mut model = Model::build(&spec, InitScheme::Zero, 0).unwrap();
        let mut grads = Gradients::zeros_like(&model);
        grads.0[0].data_mut()[0] = 1.3;
        let mut opt = Rmsprop::new(RmspropConfig::default(), &model).unwrap();
        opt.step(&mut model, &grads).unwrap();
        let step1 = model.param_tensors()[0].1.data()[0].abs();
        let w_before = model.param_tensors()[0].1.data()[0];
        opt.step(&mut model, &grads).unwrap();
        let step2 = (model.param_tensors()[0].1.data()[0] - w_before).abs();
        assert!(step2 < step1, "second step {step2} not smaller than first {step1}");
    }

    #[test]
    fn nan_gradient_aborts_with_diagnostics() {
        let spec = lr_spec();
        let mut model = Model::build(&spec, InitScheme::Zero, 0).unwrap();
        let mut grads = Gradients::zeros_like(&model);
        grads.0[0].data_mut()[0] = f64::NAN;
        let mut opt = Rmsprop::new(RmspropConfig::default(), &model).unwrap();
        let err = opt.step(&mut model, &grads).unwrap_err();
        assert!(err.to_string().contains("head.weights"), "{err}");
    }

    #[test]
    fn separable_toy_problem_trains_to_low_loss() {
        let data = toy_data(40);
        let cfg = TrainConfig {
            seed: 3,
            patience: 50,
            ..TrainConfig::default()
        };
        let spec = ModelSpec {
            minibatch: 1,
            ..lr_spec()
        };
        let outcome = train(&spec, &data, &cfg).unwrap();
        let n = data.train_inputs.len() as f64;
        let final_mean_loss = outcome.history.last().unwrap().train_loss / n;
        assert!(
            final_mean_loss < 0.1,
            "mean loss {final_mean_loss} did not fall below 0.1"
        );
        // loss decreases from start to finish
        assert!(outcome.history.last().unwrap().train_loss < outcome.history[0].train_loss);
    }

    #[test]
    fn patience_zero_stops_one_epoch_after_first_non_improvement() {
        let data = toy_data(4);
        let cfg = TrainConfig {
            seed: 5,
            patience: 0,
            max_epochs: 50,
            ..TrainConfig::default()
        };
        let outcome = train(&lr_spec(), &data, &cfg).unwrap();
        let epochs_run = outcome.history.len();
        if epochs_run < 50 {
            // stopped early: the last epoch is the single non-improving one
            assert_eq!(outcome.best_epoch, epochs_run - 1);
        }
    }

    #[test]
    fn same_seed_gives_bitwise_identical_history() {
        let data = toy_data(10);
        let spec = ModelSpec {
            dropout: 0.2,
            ..lr_spec()
        };
        let cfg = TrainConfig {
            seed: 11,
            max_epochs: 8,
            ..TrainConfig::default()
        };
        let a = train(&spec, &data, &cfg).unwrap();
        let b = train(&spec, &data, &cfg).unwrap();
        assert_eq!(a.history.len(), b.history.len());
        for (ea, eb) in a.history.iter().zip(&b.history) {
            assert_eq!(ea.train_loss.to_bits(), eb.train_loss.to_bits());
            assert_eq!(ea.val_loss.to_bits(), eb.val_loss.to_bits());
        }
    }

    #[test]
    fn best_checkpoint_has_the_minimum_validation_loss() {
        let data = toy_data(12);
        let cfg = TrainConfig {
            seed: 2,
            max_epochs: 20,
            patience: 20,
            ..TrainConfig::default()
        };
        let outcome = train(&lr_spec(), &data, &cfg).unwrap();
        let min_val = outcome
            .history
            .iter()
            .map(|e| e.val_loss)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(outcome.best_val_loss, min_val);
    }

    #[test]
    fn zero_init_keeps_mlp_hidden_units_identical() {
        // the symmetry pathology: with zero initialization the hidden layer
        // receives no gradient through the zero head, so all hidden units
        // stay identical throughout training
        let data = toy_data(10);
        let spec = ModelSpec {
            arch: ArchSpec::Mlp { hidden: 4 },
            ..lr_spec()
        };
        let cfg = TrainConfig {
            seed: 7,
            max_epochs: 10,
            patience: 10,
            init: InitScheme::Zero,
            ..TrainConfig::default()
        };
        let outcome = train(&spec, &data, &cfg).unwrap();
        let tensors = outcome.model.param_tensors();
        let (_, hidden_weights) = tensors.iter().find(|(n, _)| *n == "hidden.weights").unwrap();
        for row in 0..hidden_weights.rows() {
            let first = hidden_weights.at(row, 0);
            for col in 1..hidden_weights.cols() {
                assert_eq!(hidden_weights.at(row, col), first);
            }
        }
    }

    #[test]
    fn grid_expansion_is_the_exact_cartesian_product() {
        let grid = GridSpec {
            hidden: vec![2, 5],
            dropout: vec![0.0, 0.5],
            minibatch: vec![5],
            ..GridSpec::default()
        };
        let specs = grid.expand(ArchFamily::Mlp, InputRepr::RawPadded, 10).unwrap();
        assert_eq!(specs.len(), 2 * 2);
        let unique: std::collections::BTreeSet<String> =
            specs.iter().map(|s| format!("{s:?}")).collect();
        assert_eq!(unique.len(), specs.len());
    }
}
