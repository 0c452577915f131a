#![allow(dead_code)]

use std::path::PathBuf;

use bayes_gbm::series::{load_price_series, to_increments, IncrementSeries, PriceSeries};

pub const DAYS_PER_YEAR: f64 = 252.0;
pub const SEED: u64 = 20_150_101;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn sp500_fit_window() -> PriceSeries {
    load_price_series(data_path("sp500_2009_2014.csv"), "date", "close").expect("vendored data")
}

pub fn sp500_holdout() -> PriceSeries {
    load_price_series(data_path("sp500_2015_jan_feb.csv"), "date", "close").expect("vendored data")
}

pub fn sp500_increments() -> (PriceSeries, IncrementSeries) {
    let s = sp500_fit_window();
    let inc = to_increments(&s, DAYS_PER_YEAR).unwrap();
    (s, inc)
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn var(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the sample variance, from the fourth central moment.
pub fn var_se(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let n = xs.len() as f64;
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    ((m4 - m2 * m2) / n).sqrt()
}

/// Equal-tailed 95% interval.
pub fn interval95(xs: &[f64]) -> (f64, f64) {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    (
        bayes_gbm::diagnostics::quantile_sorted(&s, 0.025),
        bayes_gbm::diagnostics::quantile_sorted(&s, 0.975),
    )
}
