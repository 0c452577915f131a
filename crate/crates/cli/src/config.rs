use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bayes_gbm::chain::ModelKind;
use bayes_gbm::predictive::FittedMode;
use clap::{Args, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Gbm,
    GbmJump,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> Self {
        match m {
            Model::Gbm => ModelKind::Gbm,
            Model::GbmJump => ModelKind::GbmJump,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FittedPaths {
    /// Fresh jumps at every step.
    Unconditional,
    /// Jumps taken from the sampler's latent state (jump model only).
    Latent,
}

/// Flags shared by every subcommand. Each may also come from a `BAYES_GBM_*`
/// environment variable or from the `--config` file; flags win, then the
/// environment, then the file, then built-in defaults.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunArgs {
    /// TOML file with any of these options (kebab-case keys)
    #[arg(long, env = "BAYES_GBM_CONFIG")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Price CSV with a header row
    #[arg(long, env = "BAYES_GBM_INPUT")]
    pub input: Option<PathBuf>,
    #[arg(long, env = "BAYES_GBM_DATE_COLUMN")]
    pub date_column: Option<String>,
    #[arg(long, env = "BAYES_GBM_PRICE_COLUMN")]
    pub price_column: Option<String>,
    #[arg(long, value_enum, env = "BAYES_GBM_MODEL")]
    pub model: Option<Model>,
    /// Retained draws after burn-in
    #[arg(long, env = "BAYES_GBM_ITERS")]
    pub iters: Option<usize>,
    #[arg(long, env = "BAYES_GBM_BURNIN")]
    pub burnin: Option<usize>,
    #[arg(long, env = "BAYES_GBM_SEED")]
    pub seed: Option<u64>,
    #[arg(long, env = "BAYES_GBM_DAYS_PER_YEAR")]
    pub days_per_year: Option<f64>,
    /// Use calendar-day gaps instead of one trading step per row
    #[arg(long, env = "BAYES_GBM_CALENDAR_DAYS")]
    pub calendar_days: Option<bool>,
    /// Forecast steps
    #[arg(long, env = "BAYES_GBM_HORIZON")]
    pub horizon: Option<usize>,
    /// Credible band level in (0, 1)
    #[arg(long, env = "BAYES_GBM_LEVEL")]
    pub level: Option<f64>,
    /// Output directory
    #[arg(long, env = "BAYES_GBM_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, env = "BAYES_GBM_FORMAT")]
    pub format: Option<Format>,
    /// Posterior draws used for path ensembles
    #[arg(long, env = "BAYES_GBM_MAX_DRAWS")]
    pub max_draws: Option<usize>,
}

impl RunArgs {
    fn or(self, other: RunArgs) -> RunArgs {
        RunArgs {
            config: self.config.or(other.config),
            input: self.input.or(other.input),
            date_column: self.date_column.or(other.date_column),
            price_column: self.price_column.or(other.price_column),
            model: self.model.or(other.model),
            iters: self.iters.or(other.iters),
            burnin: self.burnin.or(other.burnin),
            seed: self.seed.or(other.seed),
            days_per_year: self.days_per_year.or(other.days_per_year),
            calendar_days: self.calendar_days.or(other.calendar_days),
            horizon: self.horizon.or(other.horizon),
            level: self.level.or(other.level),
            out: self.out.or(other.out),
            format: self.format.or(other.format),
            max_draws: self.max_draws.or(other.max_draws),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub date_column: String,
    pub price_column: String,
    pub model: ModelKind,
    pub iters: usize,
    pub burnin: usize,
    pub seed: u64,
    pub days_per_year: f64,
    pub calendar_days: bool,
    pub horizon: usize,
    pub level: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub max_draws: usize,
}

impl RunConfig {
    pub fn resolve(args: RunArgs) -> Result<Self> {
        let from_file = match &args.config {
            Some(path) => read_config(path)?,
            None => RunArgs::default(),
        };
        let a = args.or(from_file);
        let cfg = RunConfig {
            input: a.input.context("--input is required")?,
            date_column: a.date_column.unwrap_or_else(|| "date".into()),
            price_column: a.price_column.unwrap_or_else(|| "close".into()),
            model: a.model.unwrap_or(Model::Gbm).into(),
            iters: a.iters.unwrap_or(5_000),
            burnin: a.burnin.unwrap_or(1_000),
            seed: a.seed.unwrap_or(42),
            days_per_year: a.days_per_year.unwrap_or(252.0),
            calendar_days: a.calendar_days.unwrap_or(false),
            horizon: a.horizon.unwrap_or(40),
            level: a.level.unwrap_or(0.90),
            out: a.out,
            format: a.format.unwrap_or(Format::Csv),
            max_draws: a.max_draws.unwrap_or(2_000),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.iters < 1 {
            bail!("--iters must be at least 1");
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            bail!("--level must lie in (0, 1), got {}", self.level);
        }
        if !(self.days_per_year > 0.0) {
            bail!(
                "--days-per-year must be positive, got {}",
                self.days_per_year
            );
        }
        if self.max_draws < 2 {
            bail!("--max-draws must be at least 2");
        }
        Ok(())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn read_config(path: &Path) -> Result<RunArgs> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
}

impl From<FittedPaths> for FittedMode {
    fn from(m: FittedPaths) -> Self {
        match m {
            FittedPaths::Unconditional => FittedMode::Unconditional,
            FittedPaths::Latent => FittedMode::LatentConditioned,
        }
    }
}
