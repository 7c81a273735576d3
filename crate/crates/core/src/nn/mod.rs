//! From-scratch neural network kernels.
//!
//! Every layer implements an explicit forward pass and a hand-derived
//! backward pass returning exact analytic gradients; there is no graph
//! tracing. All math is in double precision. The gradient-check suite in
//! `tests/gradients.rs` holds each backward pass to central finite
//! differences.

pub mod activation;
pub mod checkpoint;
pub mod conv;
pub mod dense;
pub mod dropout;
pub mod loss;
pub mod pool;
pub mod recurrent;

pub use activation::Activation;
pub use checkpoint::Checkpoint;
pub use conv::Conv1dLayer;
pub use dense::DenseLayer;
pub use dropout::{dropout_backward, dropout_forward, DropoutMask};
pub use loss::{clamp_probability, cross_entropy, cross_entropy_batch, OutputHead};
pub use pool::{max_pool, max_pool_backward, max_pool_with_argmax, mean_pool_time, mean_pool_time_backward};
pub use recurrent::{LstmLayer, LstmState, RnnLayer};
