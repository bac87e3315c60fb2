//! Log-volatility, lagged increments, shuffle surrogates and distribution
//! diagnostics.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::market_data::RVSeries;

#[derive(Debug, Clone, PartialEq)]
pub struct LogVolSeries {
    /// `(date, ln sqrt(rv))` for each day with strictly positive RV.
    pub days: Vec<(NaiveDate, f64)>,
    /// Days removed because their RV was zero.
    pub dropped_zero_rv: usize,
}

impl LogVolSeries {
    /// Wraps an undated log-volatility path, e.g. a synthetic one.
    ///
    /// Days are numbered consecutively from 1970-01-01; only the order matters
    /// downstream.
    pub fn from_values(values: &[f64]) -> Self {
        let epoch = NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid epoch");
        let days = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (epoch + chrono::Days::new(i as u64), v))
            .collect();
        Self { days, dropped_zero_rv: 0 }
    }

    pub fn values(&self) -> Vec<f64> {
        self.days.iter().map(|&(_, v)| v).collect()
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }
}

/// `ln(sqrt(rv))` per day; zero-RV days are dropped and counted.
pub fn log_vol(rv: &RVSeries) -> Result<LogVolSeries> {
    let mut dropped = 0;
    let days: Vec<(NaiveDate, f64)> = rv
        .days
        .iter()
        .filter_map(|d| {
            if d.rv > 0.0 {
                Some((d.date, 0.5 * d.rv.ln()))
            } else {
                dropped += 1;
                None
            }
        })
        .collect();
    if days.is_empty() {
        return Err(Error::ZeroVariance("every day has rv = 0".into()));
    }
    if dropped > 0 {
        log::warn!("dropped {dropped} days with zero realized variance");
    }
    Ok(LogVolSeries { days, dropped_zero_rv: dropped })
}

/// Log-volatility increments at a fixed lag, indexed by retained day.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementSeries {
    pub values: Vec<f64>,
    pub lag_days: usize,
    pub origin_label: String,
}

impl IncrementSeries {
    pub fn new(values: Vec<f64>, lag_days: usize, origin_label: impl Into<String>) -> Self {
        Self { values, lag_days, origin_label: origin_label.into() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `values[k-1] = lv[kΔ] - lv[(k-1)Δ]` for `k = 1..=floor((N-1)/Δ)`.
///
/// Indices count retained days, not calendar days.
pub fn increments(lv: &LogVolSeries, lag_days: usize) -> Result<IncrementSeries> {
    if lag_days == 0 {
        return Err(Error::invalid("lag must be at least 1 day"));
    }
    if lv.len() < lag_days + 1 {
        return Err(Error::TooShort { needed: lag_days + 1, got: lv.len() });
    }
    let values: Vec<f64> = lv
        .days
        .iter()
        .step_by(lag_days)
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| w[1].1 - w[0].1)
        .collect();
    Ok(IncrementSeries::new(values, lag_days, format!("log-volatility increments, lag {lag_days}")))
}

/// Uniformly random permutation of the increments.
///
/// Fisher-Yates driven by ChaCha8 seeded through `SeedableRng::seed_from_u64`;
/// the output is a pure function of the input and `seed`.
pub fn shuffle(inc: &IncrementSeries, seed: u64) -> IncrementSeries {
    let mut values = inc.values.clone();
    fisher_yates(&mut values, seed);
    IncrementSeries::new(values, inc.lag_days, format!("{} (shuffled, seed {seed})", inc.origin_label))
}

pub(crate) fn fisher_yates(values: &mut [f64], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..values.len()).rev() {
        let j = rng.random_range(0..=i);
        values.swap(i, j);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSummary {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    /// Pearson kurtosis `m4 / m2^2`; 3 for a Gaussian.
    pub kurtosis: f64,
    /// `(bin_center, density)` over `[min, max]`.
    pub histogram: Vec<(f64, f64)>,
    /// Moment-matched Gaussian density at each bin center.
    pub gaussian_density_at_bins: Vec<f64>,
}

/// Central moments, kurtosis and a density histogram with Gaussian overlay.
pub fn distribution_summary(inc: &IncrementSeries, n_bins: usize) -> Result<DistributionSummary> {
    let x = &inc.values;
    if x.len() < 4 {
        return Err(Error::TooShort { needed: 4, got: x.len() });
    }
    if n_bins == 0 {
        return Err(Error::invalid("histogram needs at least one bin"));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    if !(m2 > 0.0) {
        return Err(Error::ZeroVariance("increments are constant; kurtosis undefined".into()));
    }
    let std = m2.sqrt();

    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for &v in x {
        let bin = (((v - lo) / width) as usize).min(n_bins - 1);
        counts[bin] += 1;
    }
    let histogram: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (lo + (i as f64 + 0.5) * width, c as f64 / (n * width)))
        .collect();
    let norm = 1.0 / (std * (2.0 * std::f64::consts::PI).sqrt());
    let gaussian_density_at_bins = histogram
        .iter()
        .map(|&(c, _)| norm * (-0.5 * ((c - mean) / std).powi(2)).exp())
        .collect();

    Ok(DistributionSummary { mean, std, kurtosis: m4 / (m2 * m2), histogram, gaussian_density_at_bins })
}
