//! Two-block conjugate Gibbs sampler for `(theta, sigma2)`.
//!
//! Prior: `theta ~ N(theta_mean, theta_var)`, `sigma2 ~ IG(ig_shape, ig_scale)`.
//! With increments `d_i ~ N(theta dt_i, sigma2 dt_i)` the full conditionals are
//!
//! ```text
//! theta | sigma2 ~ N((sum d + m s2/v) / (s2/v + T), s2 / (s2/v + T))
//! sigma2 | theta ~ IG(a + n/2, b + sum (d_i - theta dt_i)^2 / (2 dt_i))
//! ```
//!
//! where `T = sum dt_i`.

use rand::Rng;
use serde::Serialize;

use crate::chain::{ChainMeta, Draw, ModelKind, PosteriorChain};
use crate::dist::{InverseGamma, NormalLaw};
use crate::error::{invalid, Result};
use crate::exec;
use crate::gbm::mle_fit;
use crate::series::IncrementSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GbmPrior {
    pub theta_mean: f64,
    pub theta_var: f64,
    pub ig_shape: f64,
    pub ig_scale: f64,
}

impl Default for GbmPrior {
    fn default() -> Self {
        Self {
            theta_mean: 0.0,
            theta_var: 100.0,
            ig_shape: 2.0,
            ig_scale: 0.001,
        }
    }
}

impl GbmPrior {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta_var > 0.0 && self.ig_shape > 0.0 && self.ig_scale > 0.0) {
            return Err(invalid(format!("invalid prior {self:?}")));
        }
        Ok(())
    }

    pub fn sigma2_prior(&self) -> InverseGamma {
        InverseGamma {
            shape: self.ig_shape,
            scale: self.ig_scale,
        }
    }
}

/// Sufficient statistics for the `theta` update.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct DriftStats {
    pub sum_d: f64,
    pub sum_dt: f64,
}

pub(crate) fn theta_law(stats: DriftStats, sigma2: f64, prior: &GbmPrior) -> Result<NormalLaw> {
    if !(sigma2 > 0.0) {
        return Err(invalid(format!("sigma2 must be positive, got {sigma2}")));
    }
    let denom = sigma2 / prior.theta_var + stats.sum_dt;
    NormalLaw::new(
        (stats.sum_d + prior.theta_mean * sigma2 / prior.theta_var) / denom,
        sigma2 / denom,
    )
}

pub(crate) fn sigma2_law(n: usize, sum_sq: f64, prior: &GbmPrior) -> Result<InverseGamma> {
    InverseGamma::new(
        prior.ig_shape + 0.5 * n as f64,
        prior.ig_scale + 0.5 * sum_sq,
    )
}

/// `sum (d_i - theta dt_i)^2 / dt_i`.
pub(crate) fn scaled_residual_ss(pairs: impl Iterator<Item = (f64, f64)>, theta: f64) -> f64 {
    pairs
        .map(|(d, dt)| {
            let e = d - theta * dt;
            e * e / dt
        })
        .sum()
}

/// Full conditional of `theta` given `sigma2`.
pub fn theta_conditional(
    inc: &IncrementSeries,
    sigma2: f64,
    prior: &GbmPrior,
) -> Result<NormalLaw> {
    let stats = DriftStats {
        sum_d: inc.total_increment(),
        sum_dt: inc.total_time(),
    };
    theta_law(stats, sigma2, prior)
}

/// Full conditional of `sigma2` given `theta`.
pub fn sigma2_conditional(
    inc: &IncrementSeries,
    theta: f64,
    prior: &GbmPrior,
) -> Result<InverseGamma> {
    sigma2_law(inc.len(), scaled_residual_ss(inc.iter(), theta), prior)
}

pub fn sample_theta_given_sigma2<R: Rng + ?Sized>(
    inc: &IncrementSeries,
    sigma2: f64,
    prior: &GbmPrior,
    rng: &mut R,
) -> Result<f64> {
    Ok(theta_conditional(inc, sigma2, prior)?.sample(rng))
}

pub fn sample_sigma2_given_theta<R: Rng + ?Sized>(
    inc: &IncrementSeries,
    theta: f64,
    prior: &GbmPrior,
    rng: &mut R,
) -> Result<f64> {
    Ok(sigma2_conditional(inc, theta, prior)?.sample(rng))
}

/// Starting point: the MLE when it exists, otherwise prior-based values.
pub(crate) fn initial_state(inc: &IncrementSeries, prior: &GbmPrior) -> Result<(f64, f64)> {
    if inc.len() >= 2 {
        let fit = mle_fit(inc)?.non_degenerate()?;
        return Ok((fit.theta(), fit.sigma2()));
    }
    let sigma2 = prior.sigma2_prior().mode();
    let theta = if inc.is_empty() {
        prior.theta_mean
    } else {
        inc.total_increment() / inc.total_time()
    };
    Ok((theta, sigma2))
}

/// Runs `burn_in + n_keep` sweeps and keeps the last `n_keep`.
pub fn run_gibbs(
    inc: &IncrementSeries,
    prior: &GbmPrior,
    n_keep: usize,
    burn_in: usize,
    seed: u64,
) -> Result<PosteriorChain> {
    prior.validate()?;
    if n_keep == 0 {
        return Err(invalid("at least one retained draw is required"));
    }
    let (_, mut sigma2) = initial_state(inc, prior)?;
    let stats = DriftStats {
        sum_d: inc.total_increment(),
        sum_dt: inc.total_time(),
    };
    let mut rng = exec::root_rng(seed);
    let mut draws = Vec::with_capacity(n_keep);
    for sweep in 0..burn_in + n_keep {
        let theta = theta_law(stats, sigma2, prior)?.sample(&mut rng);
        sigma2 =
            sigma2_law(inc.len(), scaled_residual_ss(inc.iter(), theta), prior)?.sample(&mut rng);
        if sweep >= burn_in {
            draws.push(Draw {
                theta,
                sigma2,
                jump: None,
            });
        }
    }
    Ok(PosteriorChain {
        meta: ChainMeta {
            model: ModelKind::Gbm,
            draws: n_keep,
            burn_in,
            seed,
        },
        draws,
        jump_probability: None,
        latent: Vec::new(),
    })
}
