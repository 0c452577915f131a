//! Geometric Brownian motion: exact transition law, likelihood, closed-form
//! MLE and exact path simulation.
//!
//! Log increments over a step `dt` are `N(theta * dt, sigma2 * dt)` with
//! `theta = mu - sigma2 / 2`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::series::IncrementSeries;

/// Log-scale drift `theta` and diffusion variance `sigma2`, both per year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GbmParams {
    theta: f64,
    sigma2: f64,
}

impl GbmParams {
    /// `sigma2 == 0` is accepted and marks a noiseless process.
    pub fn new(theta: f64, sigma2: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(invalid(format!("theta must be finite, got {theta}")));
        }
        if !(sigma2 >= 0.0 && sigma2.is_finite()) {
            return Err(invalid(format!(
                "sigma2 must be non-negative, got {sigma2}"
            )));
        }
        Ok(Self { theta, sigma2 })
    }

    pub fn from_drift_diffusion(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(mu - 0.5 * sigma * sigma, sigma * sigma)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn mu(&self) -> f64 {
        self.theta + 0.5 * self.sigma2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    pub fn is_degenerate(&self) -> bool {
        self.sigma2 == 0.0
    }
}

/// Normal log-density with the given mean and variance.
pub(crate) fn normal_logpdf(x: f64, mean: f64, var: f64) -> f64 {
    let r = x - mean;
    -0.5 * (2.0 * PI * var).ln() - r * r / (2.0 * var)
}

pub fn transition_logpdf(d: f64, dt: f64, params: &GbmParams) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    if !(params.sigma2 > 0.0) {
        return Err(invalid("sigma2 must be positive to evaluate a density"));
    }
    Ok(normal_logpdf(d, params.theta * dt, params.sigma2 * dt))
}

/// Exact Gaussian log-likelihood of the increments, constant included.
pub fn log_likelihood(inc: &IncrementSeries, params: &GbmParams) -> Result<f64> {
    if inc.is_empty() {
        return Err(invalid("log-likelihood of an empty series"));
    }
    inc.iter()
        .map(|(d, dt)| transition_logpdf(d, dt, params))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MleFit {
    pub params: GbmParams,
    /// Set when the sample diffusion variance vanishes (log prices linear in time).
    pub degenerate: bool,
}

impl MleFit {
    pub fn theta(&self) -> f64 {
        self.params.theta
    }

    pub fn sigma2(&self) -> f64 {
        self.params.sigma2
    }

    pub fn mu(&self) -> f64 {
        self.params.mu()
    }

    pub fn sigma(&self) -> f64 {
        self.params.sigma()
    }

    /// The fitted parameters, or [`Error::Degenerate`] when the variance is zero.
    pub fn non_degenerate(&self) -> Result<GbmParams> {
        if self.degenerate {
            Err(Error::Degenerate)
        } else {
            Ok(self.params)
        }
    }
}

/// Relative size below which the residual variance is rounding noise.
const DEGENERATE_RTOL: f64 = 1e-20;

/// Closed-form maximum likelihood estimates (1/n variance divisor).
pub fn mle_fit(inc: &IncrementSeries) -> Result<MleFit> {
    let n = inc.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let theta = inc.total_increment() / inc.total_time();
    // Residual form of sum(d^2/dt) - (sum d)^2 / T; identical algebraically.
    let (resid, scale) = inc.iter().fold((0.0, 0.0), |(r, s), (d, dt)| {
        let e = d - theta * dt;
        (r + e * e / dt, s + d * d / dt)
    });
    let mut sigma2 = resid / n as f64;
    let degenerate = sigma2 <= DEGENERATE_RTOL * (scale / n as f64);
    if degenerate {
        sigma2 = 0.0;
    }
    Ok(MleFit {
        params: GbmParams::new(theta, sigma2)?,
        degenerate,
    })
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid("empty time grid"));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(invalid("non-finite time in grid"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("time grid must be strictly increasing"));
    }
    Ok(())
}

/// Exact GBM path on `grid`, starting at `x0` at `grid[0]`.
pub fn simulate_gbm_path(x0: f64, params: &GbmParams, grid: &[f64], seed: u64) -> Result<Vec<f64>> {
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(invalid(format!("initial price must be positive, got {x0}")));
    }
    validate_grid(grid)?;
    let mut rng = exec::root_rng(seed);
    Ok(gbm_path(x0, params, grid, &mut rng))
}

pub(crate) fn gbm_path<R: Rng + ?Sized>(
    x0: f64,
    params: &GbmParams,
    grid: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let mut y = x0.ln();
    let mut path = Vec::with_capacity(grid.len());
    path.push(x0);
    for w in grid.windows(2) {
        y += gbm_increment(params, w[1] - w[0], rng);
        path.push(y.exp());
    }
    path
}

/// One exact log increment over `dt`.
pub(crate) fn gbm_increment<R: Rng + ?Sized>(params: &GbmParams, dt: f64, rng: &mut R) -> f64 {
    let mut x = params.theta * dt;
    if params.sigma2 > 0.0 {
        let z: f64 = rng.sample(StandardNormal);
        x += (params.sigma2 * dt).sqrt() * z;
    }
    x
}

/// Simulated increments for synthetic experiments.
pub fn simulate_increments(
    params: &GbmParams,
    n: usize,
    dt: f64,
    seed: u64,
) -> Result<IncrementSeries> {
    let mut rng = exec::root_rng(seed);
    let d = (0..n)
        .map(|_| gbm_increment(params, dt, &mut rng))
        .collect();
    IncrementSeries::uniform(d, dt)
}
