//! Sleep-quality prediction from wrist actigraphy.
//!
//! The pipeline: raw accelerometer epochs are parsed and aggregated to
//! minute resolution ([`ingest`]), sleep periods are detected and scored
//! ([`segmentation`]), awake segments become supervised records in one of
//! three input representations ([`dataset`]), and five classifier families
//! (logistic regression, MLP, 1-D CNN, simple RNN, LSTM) built from the
//! hand-rolled kernels in [`nn`] are trained with RMSprop ([`train`]) and
//! scored with ROC/AUC metrics ([`eval`]). A synthetic cohort generator
//! ([`synth`]) plants a known activity-to-sleep-quality relationship so the
//! whole pipeline can be verified end to end.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod models;
pub mod nn;
pub mod rng;
pub mod segmentation;
pub mod synth;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
pub use tensor::Tensor;
