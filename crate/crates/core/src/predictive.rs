//! Posterior-predictive path ensembles over the observed window and beyond,
//! and pointwise credible bands.

use std::io::Write;

use chrono::NaiveDate;
use rand::Rng;
use serde::Serialize;

use crate::chain::{Draw, ModelKind, PosteriorChain};
use crate::diagnostics::quantile_sorted;
use crate::error::{invalid, Error, Result};
use crate::exec::{self, lane, Execution};
use crate::gbm::{gbm_increment, GbmParams};
use crate::jump::{jump_increment, JumpParams};
use crate::series::IncrementSeries;

/// Simulated price paths on a common time grid, one row per posterior draw.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub grid: Vec<f64>,
    pub paths: Vec<Vec<f64>>,
    pub model: ModelKind,
    pub origin: f64,
}

impl PathEnsemble {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Column `k` of the ensemble (all paths at grid point `k`).
    pub fn at(&self, k: usize) -> Vec<f64> {
        self.paths.iter().map(|p| p[k]).collect()
    }

    /// Writes `step,time,path_0,path_1,...`, one row per grid point.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "step,time")?;
        for j in 0..self.paths.len() {
            write!(w, ",path_{j}")?;
        }
        writeln!(w)?;
        for (k, t) in self.grid.iter().enumerate() {
            write!(w, "{k},{t}")?;
            for p in &self.paths {
                write!(w, ",{}", p[k])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// How jumps enter fitted realizations of the jump model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FittedMode {
    /// Free-running paths: fresh Bernoulli jumps at every step.
    #[default]
    Unconditional,
    /// Jumps at each step are the chain's sampled latent `J_i Z_i`; only the
    /// diffusion noise is simulated. Requires latent snapshots on the chain.
    LatentConditioned,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleOptions {
    pub seed: u64,
    /// Upper bound on the number of posterior rows used, one path each.
    pub max_draws: usize,
    pub exec: Execution,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            max_draws: 2_000,
            exec: Execution::default(),
        }
    }
}

/// Up to `max` row indices spread evenly over `0..len`.
fn spread(len: usize, max: usize) -> Vec<usize> {
    let m = max.min(len);
    let mut rows: Vec<usize> = (0..m).map(|j| j * len / m).collect();
    rows.dedup();
    rows
}

enum StepLaw {
    Gbm(GbmParams),
    Jump(JumpParams),
}

impl StepLaw {
    fn of(draw: &Draw) -> Result<Self> {
        match JumpParams::from_draw(draw) {
            Some(p) => Ok(StepLaw::Jump(p)),
            None => Ok(StepLaw::Gbm(GbmParams::new(draw.theta, draw.sigma2)?)),
        }
    }

    fn step<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        match self {
            StepLaw::Gbm(p) => gbm_increment(p, dt, rng),
            StepLaw::Jump(p) => jump_increment(p, dt, rng),
        }
    }

    fn diffusion_step<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        match self {
            StepLaw::Gbm(p) => gbm_increment(p, dt, rng),
            StepLaw::Jump(p) => gbm_increment(&p.diffusion(), dt, rng),
        }
    }
}

fn check_origin(x0: f64) -> Result<()> {
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(invalid(format!(
            "starting price must be positive, got {x0}"
        )));
    }
    Ok(())
}

/// One path per retained draw over the observation grid of `inc`, from `x0`.
pub fn fitted_realizations(
    chain: &PosteriorChain,
    inc: &IncrementSeries,
    x0: f64,
    mode: FittedMode,
    opts: &EnsembleOptions,
) -> Result<PathEnsemble> {
    if chain.is_empty() {
        return Err(Error::EmptyChain);
    }
    check_origin(x0)?;
    let dts = inc.dt();
    let conditioned = mode == FittedMode::LatentConditioned && chain.model() == ModelKind::GbmJump;

    let paths = if conditioned {
        if chain.latent.is_empty() {
            return Err(invalid(
                "chain carries no latent snapshots for conditioned fitted paths",
            ));
        }
        let picks = spread(chain.latent.len(), opts.max_draws);
        let jobs: Vec<_> = picks.iter().map(|&s| &chain.latent[s]).collect();
        run_jobs(opts.exec, jobs.len(), |j| {
            let snap = jobs[j];
            let law = StepLaw::of(&chain.draws[snap.draw])?;
            let jumps = snap.dense(dts.len());
            let mut rng = exec::substream(opts.seed, lane::FITTED, snap.draw as u64);
            Ok(walk(
                x0,
                dts.iter()
                    .zip(&jumps)
                    .map(|(&dt, &z)| law.diffusion_step(dt, &mut rng) + z),
            ))
        })?
    } else {
        let rows = spread(chain.len(), opts.max_draws);
        run_jobs(opts.exec, rows.len(), |j| {
            let law = StepLaw::of(&chain.draws[rows[j]])?;
            let mut rng = exec::substream(opts.seed, lane::FITTED, rows[j] as u64);
            Ok(walk(x0, dts.iter().map(|&dt| law.step(dt, &mut rng))))
        })?
    };
    Ok(PathEnsemble {
        grid: inc.times(),
        paths,
        model: chain.model(),
        origin: x0,
    })
}

/// Posterior-predictive paths of `horizon_steps` increments of `dt` from `s_last`.
pub fn forecast(
    chain: &PosteriorChain,
    s_last: f64,
    horizon_steps: usize,
    dt: f64,
    opts: &EnsembleOptions,
) -> Result<PathEnsemble> {
    if chain.is_empty() {
        return Err(Error::EmptyChain);
    }
    check_origin(s_last)?;
    if horizon_steps == 0 {
        return Err(invalid("forecast horizon must be at least one step"));
    }
    if !(dt > 0.0) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    let rows = spread(chain.len(), opts.max_draws);
    let paths = run_jobs(opts.exec, rows.len(), |j| {
        let law = StepLaw::of(&chain.draws[rows[j]])?;
        let mut rng = exec::substream(opts.seed, lane::FORECAST, rows[j] as u64);
        Ok(walk(
            s_last,
            (0..horizon_steps).map(|_| law.step(dt, &mut rng)),
        ))
    })?;
    Ok(PathEnsemble {
        grid: (0..=horizon_steps).map(|k| k as f64 * dt).collect(),
        paths,
        model: chain.model(),
        origin: s_last,
    })
}

fn run_jobs<F>(exec: Execution, n: usize, f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(usize) -> Result<Vec<f64>> + Sync + Send,
{
    exec.map_range(n, f).into_iter().collect()
}

/// Prices `x0 * exp(cumsum(steps))`, starting with `x0`.
fn walk(x0: f64, steps: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut y = x0.ln();
    let mut path = vec![x0];
    for s in steps {
        y += s;
        path.push(y.exp());
    }
    path
}

/// Pointwise lower and upper quantiles and mean of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Band {
    pub grid: Vec<f64>,
    pub lower: Vec<f64>,
    pub mean: Vec<f64>,
    pub upper: Vec<f64>,
    pub level: f64,
}

impl Band {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn width(&self, k: usize) -> f64 {
        self.upper[k] - self.lower[k]
    }

    pub fn mean_width(&self) -> f64 {
        (0..self.len()).map(|k| self.width(k)).sum::<f64>() / self.len() as f64
    }

    /// Fraction of `observed[k]` (aligned with grid points `offset..`) inside the band.
    pub fn coverage(&self, observed: &[f64], offset: usize) -> f64 {
        let n = observed.len().min(self.len().saturating_sub(offset));
        if n == 0 {
            return 0.0;
        }
        let hits = (0..n)
            .filter(|&i| {
                let k = i + offset;
                self.lower[k] <= observed[i] && observed[i] <= self.upper[k]
            })
            .count();
        hits as f64 / n as f64
    }

    /// Writes `time,date,lower,mean,upper`; `dates` may be shorter than the grid.
    pub fn write_csv<W: Write>(&self, mut w: W, dates: &[NaiveDate]) -> std::io::Result<()> {
        writeln!(w, "time,date,lower,mean,upper")?;
        for k in 0..self.len() {
            let date = dates.get(k).map(|d| d.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{}",
                self.grid[k], date, self.lower[k], self.mean[k], self.upper[k]
            )?;
        }
        Ok(())
    }
}

pub fn credible_band(ens: &PathEnsemble, level: f64) -> Result<Band> {
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid(format!(
            "credible level must lie in (0, 1), got {level}"
        )));
    }
    if ens.len() < 2 {
        return Err(invalid(format!(
            "need at least two paths for a band, got {}",
            ens.len()
        )));
    }
    let tail = 0.5 * (1.0 - level);
    let mut lower = Vec::with_capacity(ens.grid.len());
    let mut mean = Vec::with_capacity(ens.grid.len());
    let mut upper = Vec::with_capacity(ens.grid.len());
    for k in 0..ens.grid.len() {
        let mut col = ens.at(k);
        let m = col.iter().sum::<f64>() / col.len() as f64;
        col.sort_by(f64::total_cmp);
        let lo = quantile_sorted(&col, tail);
        let hi = quantile_sorted(&col, 1.0 - tail);
        lower.push(lo);
        // Rounding in the sum can put the mean a hair outside identical quantiles.
        mean.push(m.clamp(lo, hi));
        upper.push(hi);
    }
    Ok(Band {
        grid: ens.grid.clone(),
        lower,
        mean,
        upper,
        level,
    })
}
