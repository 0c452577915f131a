use std::process::ExitCode;

use anyhow::Result;
use bayes_gbm_cli::config::FittedPaths;
use bayes_gbm_cli::{cmd_fit, cmd_forecast, cmd_mle, ForecastArgs, RunArgs, RunConfig};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bayes-gbm",
    version,
    about = "Bayesian and maximum-likelihood fitting of geometric Brownian motion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form maximum likelihood estimates
    Mle {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the Gibbs sampler and write the chain and posterior summary
    Fit {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Posterior predictive forecast band, optionally with a fitted band
    Forecast {
        #[command(flatten)]
        run: RunArgs,
        /// Chain CSV written by `fit`; otherwise the sampler runs first
        #[arg(long, env = "BAYES_GBM_CHAIN")]
        chain: Option<std::path::PathBuf>,
        /// Held-out prices to score against the band
        #[arg(long, env = "BAYES_GBM_HOLDOUT")]
        holdout: Option<std::path::PathBuf>,
        /// Also write a fitted band over the input window
        #[arg(long)]
        fitted: bool,
        #[arg(long, value_enum)]
        fitted_mode: Option<FittedPaths>,
        /// Also write every simulated forecast path
        #[arg(long)]
        export_paths: bool,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Mle { run } => cmd_mle(&RunConfig::resolve(run)?).map(drop),
        Command::Fit { run } => cmd_fit(&RunConfig::resolve(run)?).map(drop),
        Command::Forecast {
            run,
            chain,
            holdout,
            fitted,
            fitted_mode,
            export_paths,
        } => {
            let cfg = RunConfig::resolve(run)?;
            let args = ForecastArgs {
                chain,
                holdout,
                fitted,
                fitted_mode: fitted_mode.map(Into::into),
                export_paths,
            };
            cmd_forecast(&cfg, &args).map(drop)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => {
            let msg = e.to_string();
            let line = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: {}", line.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", one_line(&e));
            ExitCode::FAILURE
        }
    }
}

/// Joins the error chain on one line, skipping causes already quoted by
/// their parent.
fn one_line(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if out.contains(&msg) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&msg);
    }
    out.replace('\n', " ")
}
