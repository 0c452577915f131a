//! Maximum likelihood and Gibbs-sampling inference for geometric Brownian
//! motion, with an extension to Bernoulli-approximated Poisson jumps.
//!
//! The usual flow is: load prices with [`series::load_price_series`], turn
//! them into log increments with [`series::to_increments`], fit with
//! [`gbm::mle_fit`], [`gibbs::run_gibbs`] or [`jump::run_jump_gibbs`], then
//! summarise with [`diagnostics`] and simulate with [`predictive`].
//!
//! Data-parallel loops (latent sampling, path ensembles) go through
//! [`exec::Execution`]; with the default `parallel` feature they run on rayon,
//! otherwise sequentially. Output is identical either way.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod diagnostics;
pub mod dist;
pub mod error;
pub mod exec;
pub mod gbm;
pub mod gibbs;
pub mod jump;
pub mod predictive;
pub mod series;

pub use chain::{Draw, JumpDraw, ModelKind, Parameter, PosteriorChain};
pub use chrono::NaiveDate;
pub use error::{Error, Result};
pub use exec::Execution;
pub use gbm::{mle_fit, GbmParams, MleFit};
pub use gibbs::{run_gibbs, GbmPrior};
pub use jump::{run_jump_gibbs, run_jump_gibbs_with, JumpOptions, JumpParams, JumpPrior};
pub use predictive::{
    credible_band, fitted_realizations, forecast, Band, EnsembleOptions, FittedMode, PathEnsemble,
};
pub use series::{load_price_series, to_increments, IncrementSeries, PriceSeries};
