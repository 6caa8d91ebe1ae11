//! Estimators for high-dimensional varying index coefficient models
//!
//! The model is `y = Σ_j z_j f_j(⟨x, β_j⟩) + ε` with unknown link functions
//! `f_j`. Every estimator in this crate avoids estimating the links: the
//! generalized Stein identity `E[f(⟨x, β⟩) S(x)] = E[f'(⟨x, β⟩)] β` turns the
//! cross moment `E[y S(x) zᵀ]` into a rescaled copy of the coefficients, and
//! a single closed-form shrinkage step then imposes sparsity or low rank.
//!
//! - [`estimators`]: sparse vector, low-rank matrix and sparse matrix estimators.
//! - [`shrinkage`]: hard truncation, the soft truncation `φ`/`Φ`, soft thresholding.
//! - [`precision`]: precision matrices for heavy-tailed `z` (soft-truncated
//!   inverse, truncated-covariance CLIME).
//! - [`synth`], [`metrics`], [`experiment`]: the synthetic experiment harness.
//!
//! See `examples/` for one runnable program per capability.

pub mod data;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod precision;
pub mod rng;
pub mod score;
pub mod shrinkage;
pub mod synth;

#[doc(hidden)]
pub mod cli;

pub use data::{CoefficientMatrix, Dataset, ModelSpec, TuningParams};
pub use error::{Error, Result};
pub use score::{DesignScore, ScoreKind, ScoreSpec};
