//! Posterior summaries, partial autocorrelation and dispersion measures.

use std::io::Write;

use serde::Serialize;

use crate::chain::{Parameter, PosteriorChain};
use crate::error::{invalid, Error, Result};

/// Linear interpolation between order statistics; `sorted` must be ascending.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Arithmetic mean with one refinement pass, so constant input returns itself.
pub fn mean(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    m + xs.iter().map(|x| x - m).sum::<f64>() / n
}

/// Sample standard deviation with the `n - 1` divisor; zero for one value.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub parameter: String,
    pub mean: f64,
    pub sd: f64,
    pub q025: f64,
    pub q50: f64,
    pub q975: f64,
}

impl SummaryRow {
    pub fn from_values(parameter: impl Into<String>, values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyChain);
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self {
            parameter: parameter.into(),
            mean: mean(values),
            sd: std_dev(values),
            q025: quantile_sorted(&sorted, 0.025),
            q50: quantile_sorted(&sorted, 0.5),
            q975: quantile_sorted(&sorted, 0.975),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    pub fn get(&self, param: Parameter) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.parameter == param.name())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "parameter,mean,sd,q2.5,q50,q97.5")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.parameter, r.mean, r.sd, r.q025, r.q50, r.q975
            )?;
        }
        Ok(())
    }
}

pub fn summarize(chain: &PosteriorChain, params: &[Parameter]) -> Result<Summary> {
    if chain.is_empty() {
        return Err(Error::EmptyChain);
    }
    let rows = params
        .iter()
        .map(|&p| {
            let values = chain.column(p).ok_or_else(|| {
                invalid(format!("{} is not a {} parameter", p.name(), chain.model()))
            })?;
            SummaryRow::from_values(p.name(), &values)
        })
        .collect::<Result<_>>()?;
    Ok(Summary { rows })
}

/// Sample autocorrelations `r_0 = 1, r_1, ..., r_max_lag` (biased, `1/n` autocovariances).
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if series.len() <= max_lag + 1 {
        return Err(Error::TooShort {
            needed: max_lag + 2,
            got: series.len(),
        });
    }
    let m = mean(series);
    let centered: Vec<f64> = series.iter().map(|x| x - m).collect();
    let c0: f64 = centered.iter().map(|x| x * x).sum();
    if !(c0 > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok((0..=max_lag)
        .map(|k| {
            centered
                .iter()
                .zip(&centered[k..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / c0
        })
        .collect())
}

/// Partial autocorrelations at lags `1..=max_lag` by the Durbin-Levinson recursion.
pub fn pacf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if max_lag == 0 {
        return Err(invalid("max_lag must be at least 1"));
    }
    let r = acf(series, max_lag)?;
    let mut phi = vec![0.0; max_lag + 1];
    let mut prev = vec![0.0; max_lag + 1];
    let mut out = Vec::with_capacity(max_lag);
    let mut err = 1.0;
    for k in 1..=max_lag {
        let num = r[k] - (1..k).map(|j| prev[j] * r[k - j]).sum::<f64>();
        let a = if err > 0.0 { num / err } else { 0.0 };
        phi[k] = a;
        for j in 1..k {
            phi[j] = prev[j] - a * prev[k - j];
        }
        err *= 1.0 - a * a;
        out.push(a);
        prev[..=k].copy_from_slice(&phi[..=k]);
    }
    Ok(out)
}

/// `sd / |mean|`.
pub fn coefficient_of_variation(draws: &[f64]) -> Result<f64> {
    if draws.is_empty() {
        return Err(Error::EmptyChain);
    }
    let m = mean(draws);
    if m == 0.0 {
        return Err(Error::ZeroMean);
    }
    Ok(std_dev(draws) / m.abs())
}
