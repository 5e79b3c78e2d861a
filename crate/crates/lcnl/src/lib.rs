//! Latent-class nested logit estimation.
//!
//! A discrete-choice engine for models where unobserved classes of decision
//! makers each carry their own utility coefficients over a nested set of
//! alternatives. Provides the probability core, a full-information
//! maximum-likelihood objective with finite-difference derivatives,
//! bound-constrained simulated annealing, robust sandwich covariance,
//! averaged marginal effects, survey-coding utilities and a synthetic-data
//! simulator for parameter-recovery experiments.

pub mod error;
pub mod model;
pub mod numeric;

pub use error::{Error, Result};
