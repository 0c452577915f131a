//! Commands behind the `bayes-gbm` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bayes_gbm::chain::{ModelKind, Parameter, PosteriorChain};
use bayes_gbm::diagnostics::{pacf, summarize, Summary};
use bayes_gbm::jump::JumpOptions;
use bayes_gbm::predictive::{
    credible_band, fitted_realizations, forecast, Band, EnsembleOptions, FittedMode,
};
use bayes_gbm::series::{
    load_price_series, to_increments_with, IncrementSeries, PriceSeries, TimeStep,
};
use bayes_gbm::{mle_fit, run_gibbs, run_jump_gibbs_with, GbmPrior, JumpPrior, MleFit, NaiveDate};
use serde::Serialize;

pub use config::{Format, RunArgs, RunConfig};

/// Lags written to the PACF file.
const PACF_LAGS: usize = 40;

pub fn load(cfg: &RunConfig) -> Result<(PriceSeries, IncrementSeries)> {
    let series = load_price_series(&cfg.input, &cfg.date_column, &cfg.price_column)?;
    let step = if cfg.calendar_days {
        TimeStep::CalendarDays
    } else {
        TimeStep::Trading
    };
    let inc = to_increments_with(&series, cfg.days_per_year, step)?;
    Ok((series, inc))
}

#[derive(Debug, Clone, Serialize)]
pub struct MleReport {
    pub theta: f64,
    pub sigma2: f64,
    pub mu: f64,
    pub sigma: f64,
    pub degenerate: bool,
    pub n_increments: usize,
}

impl MleReport {
    fn new(fit: &MleFit, n: usize) -> Self {
        Self {
            theta: fit.theta(),
            sigma2: fit.sigma2(),
            mu: fit.mu(),
            sigma: fit.sigma(),
            degenerate: fit.degenerate,
            n_increments: n,
        }
    }

    fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "theta,sigma2,mu,sigma,degenerate,n_increments")?;
        writeln!(
            w,
            "{},{},{},{},{},{}",
            self.theta, self.sigma2, self.mu, self.sigma, self.degenerate, self.n_increments
        )
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.out_dir();
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    Ok(dir)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn cmd_mle(cfg: &RunConfig) -> Result<MleReport> {
    let (_, inc) = load(cfg)?;
    let fit = mle_fit(&inc)?;
    let report = MleReport::new(&fit, inc.len());
    if fit.degenerate {
        eprintln!("warning: log prices are exactly linear in time; diffusion estimate is 0");
    }
    println!("theta_hat  {}", report.theta);
    println!("sigma2_hat {}", report.sigma2);
    println!("mu_hat     {}", report.mu);
    println!("sigma_hat  {}", report.sigma);
    if cfg.out.is_some() {
        let dir = out_dir(cfg)?;
        match cfg.format {
            Format::Csv => {
                let mut w = create(&dir.join("mle.csv"))?;
                report.write_csv(&mut w)?;
                w.flush()?;
            }
            Format::Json => write_json(&dir.join("mle.json"), &report)?,
        }
    }
    Ok(report)
}

/// Runs the configured sampler. Latent snapshots are kept for fitted paths.
pub fn sample(
    cfg: &RunConfig,
    inc: &IncrementSeries,
    latent_snapshots: usize,
) -> Result<PosteriorChain> {
    let chain = match cfg.model {
        ModelKind::Gbm => run_gibbs(inc, &GbmPrior::default(), cfg.iters, cfg.burnin, cfg.seed)?,
        ModelKind::GbmJump => {
            let opts = JumpOptions {
                latent_snapshots,
                ..JumpOptions::default()
            };
            run_jump_gibbs_with(
                inc,
                &JumpPrior::default(),
                cfg.iters,
                cfg.burnin,
                cfg.seed,
                &opts,
            )?
        }
    };
    Ok(chain)
}

fn report_params(model: ModelKind) -> &'static [Parameter] {
    match model {
        ModelKind::Gbm => &Parameter::GBM_REPORT,
        ModelKind::GbmJump => &Parameter::JUMP_REPORT,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub model: ModelKind,
    pub draws: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub mle: MleReport,
    pub summary: Summary,
    /// PACF of the drift chain, lags 1.. (empty when the chain is too short).
    pub pacf_mu: Vec<f64>,
}

pub fn cmd_fit(cfg: &RunConfig) -> Result<FitReport> {
    let (series, inc) = load(cfg)?;
    let mle = mle_fit(&inc)?;
    let chain = sample(cfg, &inc, 0)?;
    let summary = summarize(&chain, report_params(chain.model()))?;
    let mu = chain.column(Parameter::Mu).expect("every model has mu");
    let lags = PACF_LAGS.min(mu.len().saturating_sub(2));
    let pacf_mu = if lags >= 1 {
        pacf(&mu, lags).unwrap_or_default()
    } else {
        Vec::new()
    };

    let dir = out_dir(cfg)?;
    let mut w = create(&dir.join("chain.csv"))?;
    chain.write_csv(&mut w)?;
    w.flush()?;

    let mut w = create(&dir.join("pacf.csv"))?;
    writeln!(w, "lag,pacf")?;
    for (k, v) in pacf_mu.iter().enumerate() {
        writeln!(w, "{},{v}", k + 1)?;
    }
    w.flush()?;

    if let Some(probs) = &chain.jump_probability {
        let mut w = create(&dir.join("jump_probability.csv"))?;
        writeln!(w, "index,date,probability")?;
        for (i, p) in probs.iter().enumerate() {
            writeln!(w, "{},{},{p}", i + 1, series.dates()[i + 1])?;
        }
        w.flush()?;
    }

    let report = FitReport {
        model: chain.model(),
        draws: chain.meta.draws,
        burn_in: chain.meta.burn_in,
        seed: chain.meta.seed,
        mle: MleReport::new(&mle, inc.len()),
        summary,
        pacf_mu,
    };
    match cfg.format {
        Format::Csv => {
            let mut w = create(&dir.join("summary.csv"))?;
            report.summary.write_csv(&mut w)?;
            w.flush()?;
        }
        Format::Json => write_json(&dir.join("summary.json"), &report)?,
    }
    println!(
        "{} posterior ({} draws, {} burn-in, seed {})",
        report.model, report.draws, report.burn_in, report.seed
    );
    for r in &report.summary.rows {
        println!(
            "{:<12} mean {:>9.5} sd {:>8.5} [{:.5}, {:.5}, {:.5}]",
            r.parameter, r.mean, r.sd, r.q025, r.q50, r.q975
        );
    }
    Ok(report)
}

#[derive(Debug, Clone, Default)]
pub struct ForecastArgs {
    /// Chain file from `fit`; when absent the sampler is run first.
    pub chain: Option<PathBuf>,
    /// Held-out prices to compare against the forecast band.
    pub holdout: Option<PathBuf>,
    pub fitted: bool,
    pub fitted_mode: Option<FittedMode>,
    pub export_paths: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ForecastReport {
    pub model: ModelKind,
    pub horizon: usize,
    pub level: f64,
    pub paths: usize,
    pub first_width: f64,
    pub last_width: f64,
    pub holdout_coverage: Option<f64>,
    pub fitted_coverage: Option<f64>,
}

pub fn cmd_forecast(cfg: &RunConfig, args: &ForecastArgs) -> Result<ForecastReport> {
    if cfg.horizon == 0 {
        bail!("--horizon must be at least 1");
    }
    let (series, inc) = load(cfg)?;
    let fitted_mode = args.fitted_mode.unwrap_or(match cfg.model {
        ModelKind::Gbm => FittedMode::Unconditional,
        ModelKind::GbmJump => FittedMode::LatentConditioned,
    });
    let chain = match &args.chain {
        Some(path) => {
            let f = File::open(path)
                .with_context(|| format!("missing chain file {}", path.display()))?;
            let chain = PosteriorChain::read_csv(BufReader::new(f))
                .with_context(|| format!("cannot read chain {}", path.display()))?;
            if args.fitted
                && fitted_mode == FittedMode::LatentConditioned
                && chain.model() == ModelKind::GbmJump
            {
                bail!("chain files carry no latent states; use --fitted-mode unconditional or omit --chain");
            }
            chain
        }
        None => {
            let snapshots = if args.fitted { cfg.max_draws } else { 0 };
            sample(cfg, &inc, snapshots)?
        }
    };
    let opts = EnsembleOptions {
        seed: cfg.seed,
        max_draws: cfg.max_draws,
        ..EnsembleOptions::default()
    };
    let dir = out_dir(cfg)?;

    let dt = 1.0 / cfg.days_per_year;
    let ens = forecast(&chain, series.last_price(), cfg.horizon, dt, &opts)?;
    let band = credible_band(&ens, cfg.level)?;
    let holdout = args
        .holdout
        .as_ref()
        .map(|p| load_price_series(p, &cfg.date_column, &cfg.price_column))
        .transpose()?;
    let mut dates = vec![series.last_date()];
    if let Some(h) = &holdout {
        dates.extend_from_slice(h.dates());
    }
    write_band(&dir.join("forecast_band.csv"), &band, &dates)?;
    if args.export_paths {
        let mut w = create(&dir.join("forecast_paths.csv"))?;
        ens.write_csv(&mut w)?;
        w.flush()?;
    }
    let holdout_coverage = holdout.as_ref().map(|h| band.coverage(h.prices(), 1));

    let fitted_coverage = if args.fitted {
        let fitted = fitted_realizations(&chain, &inc, series.prices()[0], fitted_mode, &opts)?;
        let fband = credible_band(&fitted, cfg.level)?;
        write_band(&dir.join("fitted_band.csv"), &fband, series.dates())?;
        Some(fband.coverage(series.prices(), 0))
    } else {
        None
    };

    let report = ForecastReport {
        model: chain.model(),
        horizon: cfg.horizon,
        level: cfg.level,
        paths: ens.len(),
        first_width: band.width(1),
        last_width: band.width(cfg.horizon),
        holdout_coverage,
        fitted_coverage,
    };
    if cfg.format == Format::Json {
        write_json(&dir.join("forecast.json"), &report)?;
    }
    println!(
        "{} forecast: {} paths, {} steps, {:.0}% band width {:.2} -> {:.2}",
        report.model,
        report.paths,
        report.horizon,
        100.0 * report.level,
        report.first_width,
        report.last_width
    );
    if let Some(c) = holdout_coverage {
        println!("held-out coverage {:.1}%", 100.0 * c);
    }
    if let Some(c) = fitted_coverage {
        println!("fitted-window coverage {:.1}%", 100.0 * c);
    }
    Ok(report)
}

fn write_band(path: &Path, band: &Band, dates: &[NaiveDate]) -> Result<()> {
    let mut w = create(path)?;
    band.write_csv(&mut w, dates)?;
    w.flush()?;
    Ok(())
}
