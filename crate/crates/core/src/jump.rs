//! Data-augmentation Gibbs sampler for GBM with Bernoulli-approximated
//! Poisson jumps.
//!
//! Each increment is `N(theta dt, sigma2 dt) + J_i Z_i` with
//! `J_i ~ Ber(lambda_star)` and `Z_i ~ N(mu_z, sigma2_z)`. A sweep draws, in
//! order: the latent `(J, Z)` (with `Z` marginalised when drawing `J`), then
//! `lambda_star`, then `(mu_z, sigma2_z)` from the active jump sizes, then
//! `(theta, sigma2)` from the jump-adjusted residuals `d_i - J_i Z_i`.

use rand::Rng;
use serde::Serialize;

use crate::chain::{ChainMeta, Draw, JumpDraw, LatentSnapshot, ModelKind, PosteriorChain};
use crate::dist::{BetaLaw, InverseGamma, NormalLaw};
use crate::error::{invalid, Result};
use crate::exec::{self, lane, Execution};
use crate::gbm::{gbm_increment, normal_logpdf, GbmParams};
use crate::gibbs::{
    initial_state, scaled_residual_ss, sigma2_law, theta_law, DriftStats, GbmPrior,
};
use crate::series::IncrementSeries;

/// Diffusion parameters plus per-step jump probability and log jump-size law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpParams {
    pub theta: f64,
    pub sigma2: f64,
    pub mu_z: f64,
    pub sigma2_z: f64,
    pub lambda_star: f64,
}

impl JumpParams {
    pub fn new(
        theta: f64,
        sigma2: f64,
        mu_z: f64,
        sigma2_z: f64,
        lambda_star: f64,
    ) -> Result<Self> {
        let p = Self {
            theta,
            sigma2,
            mu_z,
            sigma2_z,
            lambda_star,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2 > 0.0 && self.sigma2_z > 0.0) {
            return Err(invalid(format!(
                "variances must be positive (sigma2 = {}, sigma2_z = {})",
                self.sigma2, self.sigma2_z
            )));
        }
        if !(0.0..=1.0).contains(&self.lambda_star) {
            return Err(invalid(format!(
                "lambda_star {} outside [0, 1]",
                self.lambda_star
            )));
        }
        if !(self.theta.is_finite() && self.mu_z.is_finite()) {
            return Err(invalid("non-finite location parameter"));
        }
        Ok(())
    }

    pub fn diffusion(&self) -> GbmParams {
        GbmParams::new(self.theta, self.sigma2).expect("validated")
    }

    /// Jump rate per unit time for a step of length `dt`.
    pub fn lambda(&self, dt: f64) -> f64 {
        self.lambda_star / dt
    }

    pub(crate) fn from_draw(draw: &Draw) -> Option<Self> {
        draw.jump.map(|j| Self {
            theta: draw.theta,
            sigma2: draw.sigma2,
            mu_z: j.mu_z,
            sigma2_z: j.sigma2_z,
            lambda_star: j.lambda_star,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpPrior {
    pub diffusion: GbmPrior,
    pub jump_mean_mean: f64,
    pub jump_mean_var: f64,
    pub jump_var_shape: f64,
    pub jump_var_scale: f64,
    pub lambda_alpha: f64,
    pub lambda_beta: f64,
}

impl Default for JumpPrior {
    fn default() -> Self {
        Self {
            diffusion: GbmPrior::default(),
            jump_mean_mean: 0.0,
            jump_mean_var: 100.0,
            jump_var_shape: 2.0,
            jump_var_scale: 0.001,
            lambda_alpha: 1.0,
            lambda_beta: 1.0,
        }
    }
}

impl JumpPrior {
    pub fn validate(&self) -> Result<()> {
        self.diffusion.validate()?;
        if !(self.jump_mean_var > 0.0
            && self.jump_var_shape > 0.0
            && self.jump_var_scale > 0.0
            && self.lambda_alpha > 0.0
            && self.lambda_beta > 0.0)
        {
            return Err(invalid(format!("invalid jump prior {self:?}")));
        }
        Ok(())
    }
}

/// Jump indicators and sizes, one per increment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LatentState {
    pub jumps: Vec<bool>,
    pub sizes: Vec<f64>,
}

impl LatentState {
    pub fn zeros(n: usize) -> Self {
        Self {
            jumps: vec![false; n],
            sizes: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.jumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }

    pub fn n_jumps(&self) -> usize {
        self.jumps.iter().filter(|&&j| j).count()
    }

    /// Sizes where the indicator is set.
    pub fn active_sizes(&self) -> Vec<f64> {
        self.jumps
            .iter()
            .zip(&self.sizes)
            .filter_map(|(&j, &z)| j.then_some(z))
            .collect()
    }

    /// `J_i * Z_i`.
    pub fn contribution(&self, i: usize) -> f64 {
        if self.jumps[i] {
            self.sizes[i]
        } else {
            0.0
        }
    }
}

/// Posterior probability that increment `d` contains a jump.
pub fn jump_indicator_prob(d: f64, dt: f64, p: &JumpParams) -> Result<f64> {
    p.validate()?;
    if !(dt > 0.0) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    Ok(indicator_prob(d, dt, p))
}

fn indicator_prob(d: f64, dt: f64, p: &JumpParams) -> f64 {
    if p.lambda_star <= 0.0 {
        return 0.0;
    }
    if p.lambda_star >= 1.0 {
        return 1.0;
    }
    let drift = p.theta * dt;
    let diff_var = p.sigma2 * dt;
    let log_jump = p.lambda_star.ln() + normal_logpdf(d, drift + p.mu_z, diff_var + p.sigma2_z);
    let log_none = (-p.lambda_star).ln_1p() + normal_logpdf(d, drift, diff_var);
    1.0 / (1.0 + (log_none - log_jump).exp())
}

/// Law of `Z_i` given `J_i = 1`: prior `N(mu_z, sigma2_z)` combined with `d_i - theta dt_i`.
pub fn jump_size_conditional(d: f64, dt: f64, p: &JumpParams) -> Result<NormalLaw> {
    p.validate()?;
    let diff_var = p.sigma2 * dt;
    let var = 1.0 / (1.0 / p.sigma2_z + 1.0 / diff_var);
    NormalLaw::new(
        var * (p.mu_z / p.sigma2_z + (d - p.theta * dt) / diff_var),
        var,
    )
}

fn draw_latent_at<R: Rng + ?Sized>(d: f64, dt: f64, p: &JumpParams, rng: &mut R) -> (bool, f64) {
    let prob = indicator_prob(d, dt, p);
    let jump = rng.random::<f64>() < prob;
    let law = if jump {
        let diff_var = p.sigma2 * dt;
        let var = 1.0 / (1.0 / p.sigma2_z + 1.0 / diff_var);
        NormalLaw {
            mean: var * (p.mu_z / p.sigma2_z + (d - p.theta * dt) / diff_var),
            var,
        }
    } else {
        NormalLaw {
            mean: p.mu_z,
            var: p.sigma2_z,
        }
    };
    (jump, law.sample(rng))
}

/// Draws every `(J_i, Z_i)` sequentially from `rng`.
pub fn sample_latent<R: Rng + ?Sized>(
    inc: &IncrementSeries,
    p: &JumpParams,
    rng: &mut R,
) -> Result<LatentState> {
    p.validate()?;
    let (jumps, sizes) = inc
        .iter()
        .map(|(d, dt)| draw_latent_at(d, dt, p, rng))
        .unzip();
    Ok(LatentState { jumps, sizes })
}

/// Draws every `(J_i, Z_i)` from per-index substreams of `(seed, stream)`.
///
/// The result depends only on the arguments, not on `exec`.
pub fn sample_latent_seeded(
    inc: &IncrementSeries,
    p: &JumpParams,
    seed: u64,
    stream: u64,
    exec: Execution,
) -> Result<LatentState> {
    p.validate()?;
    let mut state = LatentState::zeros(inc.len());
    let mut buf = vec![(false, 0.0); inc.len()];
    fill_latent(inc, p, seed, stream, exec, &mut buf, &mut state);
    Ok(state)
}

fn fill_latent(
    inc: &IncrementSeries,
    p: &JumpParams,
    seed: u64,
    stream: u64,
    exec: Execution,
    buf: &mut [(bool, f64)],
    state: &mut LatentState,
) {
    let (d, dt) = (inc.d(), inc.dt());
    exec.fill_indexed(buf, |i| {
        let mut rng = exec::substream(seed, lane::LATENT | stream, i as u64);
        draw_latent_at(d[i], dt[i], p, &mut rng)
    });
    for (i, &(j, z)) in buf.iter().enumerate() {
        state.jumps[i] = j;
        state.sizes[i] = z;
    }
}

/// Full conditional of `lambda_star`: `Beta(alpha + k, beta + n - k)`.
pub fn lambda_conditional(jumps: &[bool], prior: &JumpPrior) -> Result<BetaLaw> {
    let k = jumps.iter().filter(|&&j| j).count();
    BetaLaw::new(
        prior.lambda_alpha + k as f64,
        prior.lambda_beta + (jumps.len() - k) as f64,
    )
}

pub fn update_lambda<R: Rng + ?Sized>(
    jumps: &[bool],
    prior: &JumpPrior,
    rng: &mut R,
) -> Result<f64> {
    Ok(lambda_conditional(jumps, prior)?.sample(rng))
}

/// Law of `mu_z` given `sigma2_z` and the active jump sizes.
pub fn jump_mean_conditional(
    active: &[f64],
    sigma2_z: f64,
    prior: &JumpPrior,
) -> Result<NormalLaw> {
    if !(sigma2_z > 0.0) {
        return Err(invalid(format!(
            "sigma2_z must be positive, got {sigma2_z}"
        )));
    }
    let k = active.len() as f64;
    let var = 1.0 / (1.0 / prior.jump_mean_var + k / sigma2_z);
    let sum: f64 = active.iter().sum();
    NormalLaw::new(
        var * (prior.jump_mean_mean / prior.jump_mean_var + sum / sigma2_z),
        var,
    )
}

/// Law of `sigma2_z` given `mu_z` and the active jump sizes.
pub fn jump_var_conditional(active: &[f64], mu_z: f64, prior: &JumpPrior) -> Result<InverseGamma> {
    let ss: f64 = active.iter().map(|z| (z - mu_z).powi(2)).sum();
    InverseGamma::new(
        prior.jump_var_shape + 0.5 * active.len() as f64,
        prior.jump_var_scale + 0.5 * ss,
    )
}

/// Draws `mu_z | sigma2_z` and then `sigma2_z | mu_z`.
pub fn update_jump_moments<R: Rng + ?Sized>(
    active: &[f64],
    sigma2_z: f64,
    prior: &JumpPrior,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let mu_z = jump_mean_conditional(active, sigma2_z, prior)?.sample(rng);
    let sigma2_z = jump_var_conditional(active, mu_z, prior)?.sample(rng);
    Ok((mu_z, sigma2_z))
}

/// Increments with the sampled jumps removed, `d_i - J_i Z_i`.
pub fn diffusion_residuals(inc: &IncrementSeries, latent: &LatentState) -> Vec<f64> {
    inc.d()
        .iter()
        .enumerate()
        .map(|(i, d)| d - latent.contribution(i))
        .collect()
}

/// Gibbs update of `(theta, sigma2)` on the jump-adjusted residuals.
pub fn update_diffusion_block<R: Rng + ?Sized>(
    inc: &IncrementSeries,
    latent: &LatentState,
    sigma2: f64,
    prior: &GbmPrior,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if latent.len() != inc.len() {
        return Err(invalid("latent state length differs from the series"));
    }
    let resid = diffusion_residuals(inc, latent);
    diffusion_step(&resid, inc, sigma2, prior, rng)
}

fn diffusion_step<R: Rng + ?Sized>(
    resid: &[f64],
    inc: &IncrementSeries,
    sigma2: f64,
    prior: &GbmPrior,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let stats = DriftStats {
        sum_d: resid.iter().sum(),
        sum_dt: inc.total_time(),
    };
    let theta = theta_law(stats, sigma2, prior)?.sample(rng);
    let pairs = resid.iter().copied().zip(inc.dt().iter().copied());
    let sigma2 = sigma2_law(resid.len(), scaled_residual_ss(pairs, theta), prior)?.sample(rng);
    Ok((theta, sigma2))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct JumpOptions {
    pub exec: Execution,
    /// Number of evenly spaced retained rows whose latent state is kept.
    pub latent_snapshots: usize,
    /// Hold `lambda_star` at this value instead of sampling it.
    pub pin_lambda: Option<f64>,
}

pub fn run_jump_gibbs(
    inc: &IncrementSeries,
    prior: &JumpPrior,
    n_keep: usize,
    burn_in: usize,
    seed: u64,
) -> Result<PosteriorChain> {
    run_jump_gibbs_with(inc, prior, n_keep, burn_in, seed, &JumpOptions::default())
}

pub fn run_jump_gibbs_with(
    inc: &IncrementSeries,
    prior: &JumpPrior,
    n_keep: usize,
    burn_in: usize,
    seed: u64,
    opts: &JumpOptions,
) -> Result<PosteriorChain> {
    prior.validate()?;
    if n_keep == 0 {
        return Err(invalid("at least one retained draw is required"));
    }
    if let Some(l) = opts.pin_lambda {
        if !(0.0..=1.0).contains(&l) {
            return Err(invalid(format!("pinned lambda_star {l} outside [0, 1]")));
        }
    }
    let n = inc.len();
    let (theta, sigma2) = initial_state(inc, &prior.diffusion)?;
    let sigma2_z = if n >= 2 {
        let mean = inc.total_increment() / n as f64;
        let var_d = inc.d().iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let mean_dt = inc.total_time() / n as f64;
        (var_d - sigma2 * mean_dt).max(1e-6)
    } else {
        1e-6
    };
    let mut p = JumpParams {
        theta,
        sigma2,
        mu_z: 0.0,
        sigma2_z,
        lambda_star: opts.pin_lambda.unwrap_or(0.1),
    };
    let mut latent = LatentState::zeros(n);
    let mut buf = vec![(false, 0.0); n];
    let mut rng = exec::root_rng(seed);

    let snapshot_rows = snapshot_rows(n_keep, opts.latent_snapshots);
    let mut next_snapshot = snapshot_rows.iter().peekable();

    let mut draws = Vec::with_capacity(n_keep);
    let mut jump_counts = vec![0u32; n];
    let mut snapshots = Vec::with_capacity(snapshot_rows.len());

    for sweep in 0..burn_in + n_keep {
        fill_latent(
            inc,
            &p,
            seed,
            sweep as u64,
            opts.exec,
            &mut buf,
            &mut latent,
        );
        let k = latent.n_jumps();

        p.lambda_star = match opts.pin_lambda {
            Some(l) => l,
            None => update_lambda(&latent.jumps, prior, &mut rng)?,
        };

        let active = latent.active_sizes();
        (p.mu_z, p.sigma2_z) = update_jump_moments(&active, p.sigma2_z, prior, &mut rng)?;

        let resid = diffusion_residuals(inc, &latent);
        (p.theta, p.sigma2) = diffusion_step(&resid, inc, p.sigma2, &prior.diffusion, &mut rng)?;

        if sweep >= burn_in {
            let row = sweep - burn_in;
            for (c, &j) in jump_counts.iter_mut().zip(&latent.jumps) {
                *c += j as u32;
            }
            if next_snapshot.peek() == Some(&&row) {
                next_snapshot.next();
                snapshots.push(LatentSnapshot {
                    draw: row,
                    jumps: (0..n)
                        .filter(|&i| latent.jumps[i])
                        .map(|i| (i as u32, latent.sizes[i]))
                        .collect(),
                });
            }
            draws.push(Draw {
                theta: p.theta,
                sigma2: p.sigma2,
                jump: Some(JumpDraw {
                    mu_z: p.mu_z,
                    sigma2_z: p.sigma2_z,
                    lambda_star: p.lambda_star,
                    n_jumps: k,
                }),
            });
        }
    }

    let jump_probability = jump_counts
        .into_iter()
        .map(|c| c as f64 / n_keep as f64)
        .collect();
    Ok(PosteriorChain {
        meta: ChainMeta {
            model: ModelKind::GbmJump,
            draws: n_keep,
            burn_in,
            seed,
        },
        draws,
        jump_probability: Some(jump_probability),
        latent: snapshots,
    })
}

/// Up to `count` evenly spaced row indices in `0..n_keep`, ascending.
fn snapshot_rows(n_keep: usize, count: usize) -> Vec<usize> {
    let count = count.min(n_keep);
    let mut rows: Vec<usize> = (0..count).map(|j| j * n_keep / count).collect();
    rows.dedup();
    rows
}

/// Increments simulated from the jump model, equally spaced by `dt`.
pub fn simulate_jump_increments(
    p: &JumpParams,
    n: usize,
    dt: f64,
    seed: u64,
) -> Result<IncrementSeries> {
    p.validate()?;
    let mut rng = exec::root_rng(seed);
    let d = (0..n).map(|_| jump_increment(p, dt, &mut rng)).collect();
    IncrementSeries::uniform(d, dt)
}

/// One exact diffusion step plus a Bernoulli jump.
pub(crate) fn jump_increment<R: Rng + ?Sized>(p: &JumpParams, dt: f64, rng: &mut R) -> f64 {
    let mut x = gbm_increment(&p.diffusion(), dt, rng);
    if rng.random::<f64>() < p.lambda_star {
        x += NormalLaw {
            mean: p.mu_z,
            var: p.sigma2_z,
        }
        .sample(rng);
    }
    x
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    const DT: f64 = 1.0 / 252.0;

    fn table_like() -> JumpParams {
        JumpParams::new(0.35, 0.008, -0.002, 0.0003, 0.36).unwrap()
    }

    #[test]
    fn indicator_extremes() {
        let mut p = table_like();
        for d in [-0.1, 0.0, 0.03] {
            p.lambda_star = 0.0;
            assert_eq!(jump_indicator_prob(d, DT, &p).unwrap(), 0.0);
            p.lambda_star = 1.0;
            assert_eq!(jump_indicator_prob(d, DT, &p).unwrap(), 1.0);
        }
    }

    #[test]
    fn indicator_matches_density_ratio() {
        let p = table_like();
        let d = -0.05;
        let dens = |x: f64, m: f64, v: f64| {
            (-(x - m).powi(2) / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt()
        };
        let a = p.lambda_star * dens(d, p.theta * DT + p.mu_z, p.sigma2 * DT + p.sigma2_z);
        let b = (1.0 - p.lambda_star) * dens(d, p.theta * DT, p.sigma2 * DT);
        let got = jump_indicator_prob(d, DT, &p).unwrap();
        assert_abs_diff_eq!(got, a / (a + b), epsilon = 1e-10);
    }

    #[test]
    fn indicator_rejects_degenerate_variance() {
        let mut p = table_like();
        p.sigma2_z = 0.0;
        assert!(jump_indicator_prob(0.0, DT, &p).is_err());
    }

    #[test]
    fn indicator_monotone_in_lambda() {
        let mut p = table_like();
        for d in [-0.08, -0.01, 0.0, 0.004, 0.05] {
            let mut prev = -1.0;
            for k in 0..=100 {
                p.lambda_star = k as f64 / 100.0;
                let v = jump_indicator_prob(d, DT, &p).unwrap();
                assert!(v >= prev, "d {d} lambda {}", p.lambda_star);
                prev = v;
            }
        }
    }

    #[test]
    fn no_jumps_when_lambda_zero() {
        let mut p = table_like();
        p.lambda_star = 0.0;
        let inc = simulate_jump_increments(&table_like(), 500, DT, 1).unwrap();
        let state = sample_latent(&inc, &p, &mut exec::root_rng(2)).unwrap();
        assert_eq!(state.n_jumps(), 0);
    }

    #[test]
    fn tiny_jump_variance_pins_size() {
        let mut p = table_like();
        p.sigma2_z = 1e-14;
        p.lambda_star = 1.0;
        let inc = IncrementSeries::uniform(vec![-0.05, 0.02, 0.0], DT).unwrap();
        let state = sample_latent(&inc, &p, &mut exec::root_rng(3)).unwrap();
        for z in state.sizes {
            assert_abs_diff_eq!(z, p.mu_z, epsilon = 1e-5);
        }
    }

    #[test]
    fn seeded_latent_independent_of_execution() {
        let inc = simulate_jump_increments(&table_like(), 2_000, DT, 4).unwrap();
        let a = sample_latent_seeded(&inc, &table_like(), 9, 3, Execution::Sequential).unwrap();
        let b = sample_latent_seeded(&inc, &table_like(), 9, 3, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lambda_conditional_counts() {
        let prior = JumpPrior::default();
        let law = lambda_conditional(&[], &prior).unwrap();
        assert_eq!((law.alpha, law.beta), (1.0, 1.0));
        let law = lambda_conditional(&[false; 10], &prior).unwrap();
        assert_eq!((law.alpha, law.beta), (1.0, 11.0));
        assert_abs_diff_eq!(law.mean(), 1.0 / 12.0, epsilon = 1e-15);
        let mut jumps = vec![false; 1511];
        jumps[..544].iter_mut().for_each(|j| *j = true);
        let law = lambda_conditional(&jumps, &prior).unwrap();
        assert_eq!((law.alpha, law.beta), (545.0, 968.0));
        assert_abs_diff_eq!(law.mean(), 0.360, epsilon = 5e-4);
    }

    #[test]
    fn jump_moment_conditionals() {
        let prior = JumpPrior::default();
        let law = jump_mean_conditional(&[], 0.01, &prior).unwrap();
        assert_eq!((law.mean, law.var), (0.0, 100.0));
        let law = jump_var_conditional(&[], 0.3, &prior).unwrap();
        assert_eq!((law.shape, law.scale), (2.0, 0.001));
        let law = jump_var_conditional(&[0.1, -0.1], 0.0, &prior).unwrap();
        assert_abs_diff_eq!(law.shape, 3.0);
        assert_abs_diff_eq!(law.scale, 0.011, epsilon = 1e-15);

        let active = vec![0.07; 5_000];
        let law = jump_mean_conditional(&active, 1e-4, &prior).unwrap();
        assert_abs_diff_eq!(law.mean, 0.07, epsilon = 1e-9);
        assert!(law.var.sqrt() < 1e-3);
    }

    #[test]
    fn diffusion_block_reductions() {
        let inc = simulate_jump_increments(&table_like(), 50, DT, 8).unwrap();
        let none = LatentState::zeros(50);
        assert_eq!(diffusion_residuals(&inc, &none), inc.d());

        let theta = 0.35;
        let absorbing = LatentState {
            jumps: vec![true; 50],
            sizes: inc.d().iter().map(|d| d - theta * DT).collect(),
        };
        let resid = diffusion_residuals(&inc, &absorbing);
        let pairs = resid.iter().copied().zip(inc.dt().iter().copied());
        assert!(scaled_residual_ss(pairs, theta) < 1e-25);
    }

    #[test]
    fn diffusion_scale_matches_residual_oracle() {
        let inc = simulate_jump_increments(&table_like(), 200, DT, 12).unwrap();
        let latent = sample_latent(&inc, &table_like(), &mut exec::root_rng(13)).unwrap();
        let theta = 0.2;
        let mut oracle = 0.0;
        for i in 0..inc.len() {
            let r = inc.d()[i]
                - if latent.jumps[i] {
                    latent.sizes[i]
                } else {
                    0.0
                }
                - theta * inc.dt()[i];
            oracle += r * r / inc.dt()[i];
        }
        let prior = GbmPrior::default();
        let resid = diffusion_residuals(&inc, &latent);
        let pairs = resid.iter().copied().zip(inc.dt().iter().copied());
        let law = sigma2_law(inc.len(), scaled_residual_ss(pairs, theta), &prior).unwrap();
        assert_abs_diff_eq!(law.scale, 0.001 + 0.5 * oracle, epsilon = 1e-12);
    }

    #[test]
    fn snapshot_rows_are_spread() {
        assert_eq!(snapshot_rows(10, 0), Vec::<usize>::new());
        assert_eq!(snapshot_rows(10, 5), vec![0, 2, 4, 6, 8]);
        assert_eq!(snapshot_rows(3, 10), vec![0, 1, 2]);
    }

    #[test]
    fn jump_chain_reproducible_with_snapshots() {
        let inc = simulate_jump_increments(&table_like(), 300, DT, 5).unwrap();
        let opts = JumpOptions {
            latent_snapshots: 20,
            ..JumpOptions::default()
        };
        let a = run_jump_gibbs_with(&inc, &JumpPrior::default(), 100, 20, 7, &opts).unwrap();
        let seq = JumpOptions {
            exec: Execution::Sequential,
            ..opts.clone()
        };
        let b = run_jump_gibbs_with(&inc, &JumpPrior::default(), 100, 20, 7, &seq).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);
        assert_eq!(a.latent.len(), 20);
        for d in &a.draws {
            let j = d.jump.unwrap();
            assert!(d.sigma2 > 0.0 && j.sigma2_z > 0.0);
            assert!((0.0..=1.0).contains(&j.lambda_star));
        }
        let probs = a.jump_probability.as_ref().unwrap();
        assert_eq!(probs.len(), 300);
        assert!(probs.iter().all(|p| (0.0..=1.0).contains(p)));
    }
}
