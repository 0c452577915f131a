//! Posterior chains and their delimited-text export.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Gbm,
    GbmJump,
}

impl ModelKind {
    pub fn tag(self) -> &'static str {
        match self {
            ModelKind::Gbm => "gbm",
            ModelKind::GbmJump => "gbm-jump",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gbm" => Ok(ModelKind::Gbm),
            "gbm-jump" => Ok(ModelKind::GbmJump),
            other => Err(invalid(format!("unknown model `{other}`"))),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Jump-component values of one sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpDraw {
    pub mu_z: f64,
    pub sigma2_z: f64,
    pub lambda_star: f64,
    pub n_jumps: usize,
}

/// One retained Gibbs sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Draw {
    pub theta: f64,
    pub sigma2: f64,
    pub jump: Option<JumpDraw>,
}

impl Draw {
    pub fn mu(&self) -> f64 {
        self.theta + 0.5 * self.sigma2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

/// Scalar quantities that can be read off a draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Theta,
    Sigma2,
    Mu,
    Sigma,
    MuZ,
    Sigma2Z,
    SigmaZ,
    LambdaStar,
    NJumps,
}

impl Parameter {
    pub const GBM_REPORT: [Parameter; 2] = [Parameter::Mu, Parameter::Sigma];
    pub const JUMP_REPORT: [Parameter; 5] = [
        Parameter::Mu,
        Parameter::Sigma,
        Parameter::MuZ,
        Parameter::SigmaZ,
        Parameter::LambdaStar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Parameter::Theta => "theta",
            Parameter::Sigma2 => "sigma2",
            Parameter::Mu => "mu",
            Parameter::Sigma => "sigma",
            Parameter::MuZ => "mu_z",
            Parameter::Sigma2Z => "sigma2_z",
            Parameter::SigmaZ => "sigma_z",
            Parameter::LambdaStar => "lambda_star",
            Parameter::NJumps => "n_jumps",
        }
    }

    pub fn value(self, draw: &Draw) -> Option<f64> {
        let j = draw.jump;
        match self {
            Parameter::Theta => Some(draw.theta),
            Parameter::Sigma2 => Some(draw.sigma2),
            Parameter::Mu => Some(draw.mu()),
            Parameter::Sigma => Some(draw.sigma()),
            Parameter::MuZ => j.map(|j| j.mu_z),
            Parameter::Sigma2Z => j.map(|j| j.sigma2_z),
            Parameter::SigmaZ => j.map(|j| j.sigma2_z.sqrt()),
            Parameter::LambdaStar => j.map(|j| j.lambda_star),
            Parameter::NJumps => j.map(|j| j.n_jumps as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainMeta {
    pub model: ModelKind,
    pub draws: usize,
    pub burn_in: usize,
    pub seed: u64,
}

/// Jump contributions `J_i * Z_i` at one retained sweep, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentSnapshot {
    /// Row of the chain this state belongs to.
    pub draw: usize,
    /// `(index, Z_i)` for every active indicator.
    pub jumps: Vec<(u32, f64)>,
}

impl LatentSnapshot {
    pub fn dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for &(i, z) in &self.jumps {
            out[i as usize] = z;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorChain {
    pub meta: ChainMeta,
    pub draws: Vec<Draw>,
    /// Posterior mean of each jump indicator (jump model only).
    pub jump_probability: Option<Vec<f64>>,
    /// Latent states of selected rows, in row order (jump model only).
    pub latent: Vec<LatentSnapshot>,
}

impl PosteriorChain {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn model(&self) -> ModelKind {
        self.meta.model
    }

    /// Values of `param` for every row; `None` if the model lacks it.
    pub fn column(&self, param: Parameter) -> Option<Vec<f64>> {
        self.draws.iter().map(|d| param.value(d)).collect()
    }

    pub fn to_drift_diffusion(&self) -> Vec<(f64, f64)> {
        to_drift_diffusion(&self.draws)
    }

    fn header(&self) -> &'static str {
        match self.meta.model {
            ModelKind::Gbm => "theta,sigma2,mu,sigma",
            ModelKind::GbmJump => "theta,sigma2,mu,sigma,mu_z,sigma2_z,sigma_z,lambda_star,n_jumps",
        }
    }

    /// Metadata block (`# key: value`), a header row, then one row per draw.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# model: {}", self.meta.model)?;
        writeln!(w, "# draws: {}", self.meta.draws)?;
        writeln!(w, "# burn_in: {}", self.meta.burn_in)?;
        writeln!(w, "# seed: {}", self.meta.seed)?;
        writeln!(w, "{}", self.header())?;
        let mut line = String::new();
        for d in &self.draws {
            line.clear();
            let _ = write!(line, "{},{},{},{}", d.theta, d.sigma2, d.mu(), d.sigma());
            if let Some(j) = d.jump {
                let _ = write!(
                    line,
                    ",{},{},{},{},{}",
                    j.mu_z,
                    j.sigma2_z,
                    j.sigma2_z.sqrt(),
                    j.lambda_star,
                    j.n_jumps
                );
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Inverse of [`write_csv`](Self::write_csv). Latent states are not stored in the file.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut model = None;
        let mut burn_in = 0;
        let mut seed = 0;
        let mut draws = Vec::new();
        let mut header_seen = false;
        let bad = |line: usize, message: String| Error::Parse {
            path: "<chain>".into(),
            line: line as u64,
            message,
        };
        for (i, line) in r.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| bad(lineno, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                let (key, value) = meta
                    .split_once(':')
                    .ok_or_else(|| bad(lineno, format!("malformed metadata `{line}`")))?;
                let value = value.trim();
                let num = |v: &str| v.parse::<u64>().map_err(|e| bad(lineno, e.to_string()));
                match key.trim() {
                    "model" => model = Some(value.parse::<ModelKind>()?),
                    "burn_in" => burn_in = num(value)? as usize,
                    "seed" => seed = num(value)?,
                    _ => {}
                }
                continue;
            }
            if !header_seen {
                header_seen = true;
                continue;
            }
            let model = model.ok_or_else(|| bad(lineno, "missing `# model:` line".into()))?;
            let fields = line
                .split(',')
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| bad(lineno, e.to_string()))?;
            let expected = match model {
                ModelKind::Gbm => 4,
                ModelKind::GbmJump => 9,
            };
            if fields.len() != expected {
                return Err(bad(
                    lineno,
                    format!("expected {expected} fields, got {}", fields.len()),
                ));
            }
            let jump = (model == ModelKind::GbmJump).then(|| JumpDraw {
                mu_z: fields[4],
                sigma2_z: fields[5],
                lambda_star: fields[7],
                n_jumps: fields[8] as usize,
            });
            draws.push(Draw {
                theta: fields[0],
                sigma2: fields[1],
                jump,
            });
        }
        let model = model.ok_or_else(|| bad(0, "missing `# model:` line".into()))?;
        if draws.is_empty() {
            return Err(Error::EmptyChain);
        }
        Ok(Self {
            meta: ChainMeta {
                model,
                draws: draws.len(),
                burn_in,
                seed,
            },
            draws,
            jump_probability: None,
            latent: Vec::new(),
        })
    }
}

/// `(mu, sigma)` per row, with `mu = theta + sigma2 / 2`.
pub fn to_drift_diffusion(draws: &[Draw]) -> Vec<(f64, f64)> {
    draws.iter().map(|d| (d.mu(), d.sigma())).collect()
}
