//! Price-series ingestion and the log-increment representation.

use std::path::Path;

use chrono::NaiveDate;

use crate::error::{invalid, Error, Result};

/// Dated closing prices, strictly positive and strictly increasing in date.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    dates: Vec<NaiveDate>,
    prices: Vec<f64>,
}

impl PriceSeries {
    pub fn new(dates: Vec<NaiveDate>, prices: Vec<f64>) -> Result<Self> {
        if dates.len() != prices.len() {
            return Err(invalid(format!(
                "{} dates but {} prices",
                dates.len(),
                prices.len()
            )));
        }
        if prices.len() < 2 {
            return Err(Error::TooShort {
                needed: 2,
                got: prices.len(),
            });
        }
        for (i, &p) in prices.iter().enumerate() {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::NonPositivePrice {
                    line: i as u64 + 1,
                    price: p,
                });
            }
        }
        for (i, w) in dates.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::NonIncreasingDate {
                    line: i as u64 + 2,
                    date: w[1].to_string(),
                    previous: w[0].to_string(),
                });
            }
        }
        Ok(Self { dates, prices })
    }

    /// Builds a series on consecutive days starting at 2000-01-03, for synthetic data.
    pub fn from_prices(prices: Vec<f64>) -> Result<Self> {
        let start = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
        let dates = start.iter_days().take(prices.len()).collect();
        Self::new(dates, prices)
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn last_price(&self) -> f64 {
        *self.prices.last().expect("length >= 2")
    }

    pub fn last_date(&self) -> NaiveDate {
        *self.dates.last().expect("length >= 2")
    }
}

/// Reads a headered CSV file with ISO-8601 dates.
///
/// Line numbers in errors are 1-based file lines, the header being line 1.
pub fn load_price_series(
    path: impl AsRef<Path>,
    date_column: &str,
    price_column: &str,
) -> Result<PriceSeries> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_owned(),
        source,
    };
    let file = std::fs::File::open(path).map_err(io_err)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            path: path.to_owned(),
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                path: path.to_owned(),
                column: name.to_owned(),
            })
    };
    let date_idx = column(date_column)?;
    let price_idx = column(price_column)?;

    let mut dates = Vec::new();
    let mut prices = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            path: path.to_owned(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let parse_err = |message: String| Error::Parse {
            path: path.to_owned(),
            line,
            message,
        };
        let raw_date = record.get(date_idx).unwrap_or_default();
        let date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d")
            .map_err(|e| parse_err(format!("bad date `{raw_date}`: {e}")))?;
        let raw_price = record.get(price_idx).unwrap_or_default();
        let price: f64 = raw_price
            .parse()
            .map_err(|_| parse_err(format!("bad price `{raw_price}`")))?;
        if !(price > 0.0 && price.is_finite()) {
            return Err(Error::NonPositivePrice { line, price });
        }
        if let Some(prev) = dates.last() {
            if date <= *prev {
                return Err(Error::NonIncreasingDate {
                    line,
                    date: date.to_string(),
                    previous: prev.to_string(),
                });
            }
        }
        dates.push(date);
        prices.push(price);
    }
    PriceSeries::new(dates, prices)
}

/// How elapsed time between consecutive observations is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeStep {
    /// Every observation gap counts as a single trading step.
    #[default]
    Trading,
    /// The gap is the number of calendar days between the two dates.
    CalendarDays,
}

/// Log-price increments `d_i = log S_i - log S_{i-1}` with their time steps in years.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementSeries {
    d: Vec<f64>,
    dt: Vec<f64>,
    y0: f64,
    t0: f64,
}

impl IncrementSeries {
    pub fn new(d: Vec<f64>, dt: Vec<f64>, y0: f64, t0: f64) -> Result<Self> {
        if d.len() != dt.len() {
            return Err(invalid("increments and time steps differ in length"));
        }
        if let Some(bad) = dt.iter().find(|&&s| !(s > 0.0 && s.is_finite())) {
            return Err(invalid(format!("non-positive time step {bad}")));
        }
        if d.iter().any(|x| !x.is_finite()) {
            return Err(invalid("non-finite increment"));
        }
        Ok(Self { d, dt, y0, t0 })
    }

    /// Equally spaced increments starting from log price 0 at time 0.
    pub fn uniform(d: Vec<f64>, dt: f64) -> Result<Self> {
        let n = d.len();
        Self::new(d, vec![dt; n], 0.0, 0.0)
    }

    pub fn empty() -> Self {
        Self {
            d: Vec::new(),
            dt: Vec::new(),
            y0: 0.0,
            t0: 0.0,
        }
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn dt(&self) -> &[f64] {
        &self.dt
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn total_time(&self) -> f64 {
        self.dt.iter().sum()
    }

    pub fn total_increment(&self) -> f64 {
        self.d.iter().sum()
    }

    /// Observation times `t_0, t_1, ..., t_n`.
    pub fn times(&self) -> Vec<f64> {
        std::iter::once(self.t0)
            .chain(self.dt.iter().scan(self.t0, |t, &s| {
                *t += s;
                Some(*t)
            }))
            .collect()
    }

    /// Log prices `y_0, ..., y_n` rebuilt by cumulative summation.
    pub fn log_prices(&self) -> Vec<f64> {
        std::iter::once(self.y0)
            .chain(self.d.iter().scan(self.y0, |y, &x| {
                *y += x;
                Some(*y)
            }))
            .collect()
    }

    /// Pairs `(d_i, dt_i)`.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.d.iter().copied().zip(self.dt.iter().copied())
    }
}

pub fn to_increments(series: &PriceSeries, days_per_year: f64) -> Result<IncrementSeries> {
    to_increments_with(series, days_per_year, TimeStep::Trading)
}

pub fn to_increments_with(
    series: &PriceSeries,
    days_per_year: f64,
    step: TimeStep,
) -> Result<IncrementSeries> {
    if !(days_per_year > 0.0 && days_per_year.is_finite()) {
        return Err(invalid(format!(
            "days per year must be positive, got {days_per_year}"
        )));
    }
    let logs: Vec<f64> = series.prices().iter().map(|p| p.ln()).collect();
    let d = logs.windows(2).map(|w| w[1] - w[0]).collect();
    let dt = series
        .dates()
        .windows(2)
        .map(|w| match step {
            TimeStep::Trading => 1.0 / days_per_year,
            TimeStep::CalendarDays => (w[1] - w[0]).num_days() as f64 / days_per_year,
        })
        .collect();
    IncrementSeries::new(d, dt, logs[0], 0.0)
}
