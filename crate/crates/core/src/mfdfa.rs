//! Multifractal detrended fluctuation analysis.
//!
//! For a series `x_1..x_N` the estimator
//!
//! 1. builds the profile `Y(i) = sum_{j<=i} (x_j - mean(x))`,
//! 2. cuts it into `N_s = floor(N / s)` segments of length `s` tiled from the
//!    start and another `N_s` tiled from the end,
//! 3. removes a least-squares polynomial from each segment and keeps the mean
//!    squared residual `F^2(v, s)`,
//! 4. averages `F^2(v, s)^{q/2}` over the `2 N_s` segments into `F_q(s)`
//!    (a logarithmic average at `q = 0`), and
//! 5. regresses `ln F_q(s)` on `ln s` inside a fit window; the slope is `h(q)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hurst::{ols, Estimator, HurstCurve, HurstPoint};

/// Lower end of the default scale grid.
pub const DEFAULT_S_MIN: usize = 16;
/// Points in the default geometric scale grid.
pub const DEFAULT_S_COUNT: usize = 20;
/// Minimum number of grid scales inside the fit window for the default grid.
pub const DEFAULT_FIT_POINTS: usize = 6;
pub const DEFAULT_FIT_RANGE: (usize, usize) = (80, 280);
pub const DEFAULT_POLY_ORDER: usize = 3;
pub const DEFAULT_Q_RANGE: (f64, f64, f64) = (-25.0, 25.0, 0.5);

#[derive(Debug, Clone, PartialEq)]
pub struct MfdfaConfig {
    /// Moment orders, ascending.
    pub q_grid: Vec<f64>,
    /// Segment lengths, strictly ascending.
    pub s_grid: Vec<usize>,
    /// Inclusive window of scales used for the power-law fit.
    pub fit_range: (usize, usize),
    /// Degree of the detrending polynomial.
    pub poly_order: usize,
}

impl MfdfaConfig {
    /// Default configuration for a series of length `n`: `q` from -25 to 25
    /// in steps of 0.5, cubic detrending, fit window `[80, 280]` and a
    /// geometric scale grid over `[16, n/4]`.
    pub fn for_length(n: usize) -> Self {
        let (lo, hi, step) = DEFAULT_Q_RANGE;
        Self {
            q_grid: uniform_q_grid(lo, hi, step).expect("default q grid is valid"),
            s_grid: default_s_grid(n, DEFAULT_FIT_RANGE, DEFAULT_POLY_ORDER),
            fit_range: DEFAULT_FIT_RANGE,
            poly_order: DEFAULT_POLY_ORDER,
        }
    }

    pub fn with_q_grid(mut self, q_grid: Vec<f64>) -> Self {
        self.q_grid = q_grid;
        self
    }

    /// Replaces the fit window and rebuilds the default scale grid around it.
    pub fn with_fit_range(mut self, n: usize, fit_range: (usize, usize)) -> Self {
        self.fit_range = fit_range;
        self.s_grid = default_s_grid(n, fit_range, self.poly_order);
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.q_grid.is_empty() {
            return Err(Error::invalid("q grid is empty"));
        }
        if self.q_grid.iter().any(|q| !q.is_finite()) {
            return Err(Error::invalid("q grid contains non-finite values"));
        }
        if self.q_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("q grid must be strictly increasing"));
        }
        if self.s_grid.is_empty() {
            return Err(Error::invalid("scale grid is empty"));
        }
        if self.s_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("scale grid must be strictly increasing"));
        }
        let s_min = self.s_grid[0];
        let s_max = *self.s_grid.last().expect("non-empty");
        if s_min < self.poly_order + 2 {
            return Err(Error::invalid(format!(
                "scale {s_min} too small for polynomial order {}: need s >= {}",
                self.poly_order,
                self.poly_order + 2
            )));
        }
        if s_max > n {
            return Err(Error::TooShort { needed: s_max, got: n });
        }
        let (lo, hi) = self.fit_range;
        if lo >= hi {
            return Err(Error::invalid(format!("fit window [{lo}, {hi}] is empty")));
        }
        if lo < s_min || hi > s_max {
            return Err(Error::invalid(format!(
                "fit window [{lo}, {hi}] lies outside the scale grid span [{s_min}, {s_max}]"
            )));
        }
        Ok(())
    }
}

/// `q_min, q_min + step, ..., q_max` with values within rounding of zero
/// snapped to exactly zero.
pub fn uniform_q_grid(q_min: f64, q_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid(format!("q step must be positive, got {step}")));
    }
    if !(q_min.is_finite() && q_max.is_finite()) || q_max < q_min {
        return Err(Error::invalid(format!("invalid q range [{q_min}, {q_max}]")));
    }
    let count = ((q_max - q_min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| {
            let q = q_min + i as f64 * step;
            if q.abs() < step * 1e-9 {
                0.0
            } else {
                q
            }
        })
        .collect())
}

/// `count` geometrically spaced integers in `[lo, hi]`, rounded and deduplicated.
pub fn geometric_s_grid(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    if hi <= lo || count < 2 {
        return vec![lo];
    }
    let ratio = (hi as f64 / lo as f64).ln() / (count - 1) as f64;
    let mut grid: Vec<usize> = (0..count)
        .map(|i| ((lo as f64).ln() + ratio * i as f64).exp().round() as usize)
        .map(|s| s.clamp(lo, hi))
        .collect();
    grid.dedup();
    grid
}

/// Default scale grid for a series of length `n`.
///
/// Twenty geometric points over `[16, n/4]`, densified so that at least
/// [`DEFAULT_FIT_POINTS`] scales fall inside `fit_range` when it lies within
/// that span.
pub fn default_s_grid(n: usize, fit_range: (usize, usize), poly_order: usize) -> Vec<usize> {
    let lo = DEFAULT_S_MIN.max(poly_order + 2);
    let hi = (n / 4).max(lo);
    let mut grid = geometric_s_grid(lo, hi, DEFAULT_S_COUNT);
    let (f_lo, f_hi) = fit_range;
    if f_lo >= lo && f_hi <= hi && f_lo < f_hi {
        let inside = grid.iter().filter(|&&s| s >= f_lo && s <= f_hi).count();
        if inside < DEFAULT_FIT_POINTS {
            grid.extend(geometric_s_grid(f_lo, f_hi, DEFAULT_FIT_POINTS));
            grid.sort_unstable();
            grid.dedup();
        }
    }
    grid
}

/// Cumulative sum of mean-removed values.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    values: Vec<f64>,
}

impl Profile {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn profile(x: &[f64]) -> Result<Profile> {
    if x.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: x.len() });
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let values = x
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v - mean;
            Some(*acc)
        })
        .collect();
    Ok(Profile { values })
}

/// Orthonormal polynomial basis on the points `0..s`, used to project out the
/// local trend of a segment.
struct TrendBasis {
    vectors: Vec<Vec<f64>>,
}

impl TrendBasis {
    fn new(s: usize, order: usize) -> Self {
        let half = ((s - 1) as f64 / 2.0).max(1.0);
        let t: Vec<f64> = (0..s).map(|i| (i as f64 - (s - 1) as f64 / 2.0) / half).collect();
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut v: Vec<f64> = t.iter().map(|x| x.powi(k as i32)).collect();
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for e in &vectors {
                    let c = dot(e, &v);
                    v.iter_mut().zip(e).for_each(|(a, b)| *a -= c * b);
                }
            }
            let norm = dot(&v, &v).sqrt();
            v.iter_mut().for_each(|a| *a /= norm);
            vectors.push(v);
        }
        Self { vectors }
    }

    /// Mean squared residual of `y` after removing its projection on the basis.
    fn residual_variance(&self, y: &[f64], scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        scratch.extend_from_slice(y);
        for e in &self.vectors {
            let c = dot(e, scratch);
            scratch.iter_mut().zip(e).for_each(|(a, b)| *a -= c * b);
        }
        dot(scratch, scratch) / y.len() as f64
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Detrended variances of the `2 N_s` segments of length `s`.
///
/// The first `N_s` entries tile the profile from its start, the remaining
/// `N_s` tile it from its end, ordered from the last segment backwards.
pub fn segment_variances(profile: &[f64], s: usize, poly_order: usize) -> Result<Vec<f64>> {
    let n = profile.len();
    if s < poly_order + 2 {
        return Err(Error::invalid(format!(
            "scale {s} too small for polynomial order {poly_order}: need s >= {}",
            poly_order + 2
        )));
    }
    if s > n {
        return Err(Error::TooShort { needed: s, got: n });
    }
    let n_s = n / s;
    let basis = TrendBasis::new(s, poly_order);
    let mut scratch = Vec::with_capacity(s);
    let mut out = Vec::with_capacity(2 * n_s);
    for v in 0..n_s {
        out.push(basis.residual_variance(&profile[v * s..(v + 1) * s], &mut scratch));
    }
    for v in 0..n_s {
        let end = n - v * s;
        out.push(basis.residual_variance(&profile[end - s..end], &mut scratch));
    }
    Ok(out)
}

/// Natural log of the `q`-th order fluctuation function, evaluated with a
/// log-sum-exp so that large `|q|` neither overflows nor underflows.
pub(crate) fn log_fluctuation(variances: &[f64], q: f64, scale: Option<usize>) -> Result<f64> {
    if variances.is_empty() {
        return Err(Error::invalid("no segment variances"));
    }
    if let Some(segment) = variances.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::NonFinite(format!("segment {segment} variance is {}", variances[segment])));
    }
    if q < 0.0 {
        if let Some(segment) = variances.iter().position(|&v| v == 0.0) {
            return Err(Error::ZeroSegmentVariance { scale, segment, q });
        }
    }
    let count = variances.len() as f64;
    let logs = variances.iter().map(|v| v.ln());
    if q == 0.0 {
        return Ok(0.5 * logs.sum::<f64>() / count);
    }
    let terms: Vec<f64> = logs.map(|l| 0.5 * q * l).collect();
    let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let lse = peak + terms.iter().map(|t| (t - peak).exp()).sum::<f64>().ln();
    Ok((lse - count.ln()) / q)
}

/// `F_q = (mean_v F^2(v)^{q/2})^{1/q}`, or `exp(mean_v ln F^2(v) / 2)` at `q = 0`.
pub fn fluctuation_function(variances: &[f64], q: f64) -> Result<f64> {
    log_fluctuation(variances, q, None).map(f64::exp)
}

/// `F_q(s)` over the configured `(s, q)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationTable {
    pub s_grid: Vec<usize>,
    pub q_grid: Vec<f64>,
    /// `entries[i][j] = F_{q_j}(s_i)`.
    pub entries: Vec<Vec<f64>>,
    /// Segments averaged at each scale, `2 N_s`.
    pub n_segments: Vec<usize>,
}

impl FluctuationTable {
    pub fn q_index(&self, q: f64) -> Option<usize> {
        self.q_grid.iter().position(|g| (g - q).abs() < 1e-9)
    }

    /// `F_q(s)` for every scale.
    pub fn column(&self, q_index: usize) -> Vec<f64> {
        self.entries.iter().map(|row| row[q_index]).collect()
    }
}

/// Slope, standard error and `r^2` of one power-law fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurstFit {
    pub h: f64,
    pub stderr: f64,
    pub r2: f64,
}

/// Fits `ln F_q(s) = c + h ln s` over the scales inside `fit_range`.
pub fn hurst_fit(table: &FluctuationTable, q: f64, fit_range: (usize, usize)) -> Result<HurstFit> {
    let j = table
        .q_index(q)
        .ok_or_else(|| Error::invalid(format!("q = {q} is not in the fluctuation table")))?;
    let (lo, hi) = fit_range;
    let (xs, ys): (Vec<f64>, Vec<f64>) = table
        .s_grid
        .iter()
        .zip(&table.entries)
        .filter(|(&s, _)| s >= lo && s <= hi)
        .map(|(&s, row)| ((s as f64).ln(), row[j].ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::InsufficientFitPoints { lo, hi, got: xs.len() });
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::NonFinite(format!("F_q(s) is zero or non-finite at q = {q} inside [{lo}, {hi}]")));
    }
    let fit = ols(&xs, &ys)?;
    Ok(HurstFit { h: fit.slope, stderr: fit.slope_stderr, r2: fit.r2 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MfdfaAnalysis {
    pub table: FluctuationTable,
    pub curve: HurstCurve,
}

/// Full MF-DFA of `x`.
pub fn mfdfa_analyze(x: &[f64], cfg: &MfdfaConfig) -> Result<MfdfaAnalysis> {
    cfg.validate(x.len())?;
    let y = profile(x)?;
    let rows = cfg
        .s_grid
        .par_iter()
        .map(|&s| {
            let variances = segment_variances(y.values(), s, cfg.poly_order)?;
            let row = cfg
                .q_grid
                .iter()
                .map(|&q| log_fluctuation(&variances, q, Some(s)).map(f64::exp))
                .collect::<Result<Vec<f64>>>()?;
            Ok((row, variances.len()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (entries, n_segments) = rows.into_iter().unzip();
    let table = FluctuationTable {
        s_grid: cfg.s_grid.clone(),
        q_grid: cfg.q_grid.clone(),
        entries,
        n_segments,
    };
    let points = cfg
        .q_grid
        .iter()
        .map(|&q| {
            hurst_fit(&table, q, cfg.fit_range).map(|f| HurstPoint { q, h: f.h, stderr: f.stderr, r2: f.r2 })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MfdfaAnalysis {
        table,
        curve: HurstCurve { points, estimator: Estimator::Mfdfa, fit_window: cfg.fit_range },
    })
}
