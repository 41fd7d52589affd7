//! Unweighted influence-based data subsampling for sparse L2-regularized
//! logistic regression.
//!
//! The workflow: fit `θ̂` on the full training set ([`model`]), score every
//! training row by its influence on validation loss ([`influence`]), turn
//! scores into selection probabilities and draw a fixed-budget subset
//! ([`sampling`]), retrain on the subset without importance weights and
//! compare on held-out data ([`pipeline`]). [`risk`] provides the χ²
//! worst-case risk and parameter-shift diagnostics.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod influence;
pub mod linalg;
pub mod model;
pub mod pipeline;
pub mod risk;
pub mod sampling;

pub use data::{SparseDataset, SplitSpec};
pub use influence::{InfluenceReport, PcgConfig};
pub use model::{ModelParams, TrainConfig};
pub use sampling::{Method, SamplingPlan};
