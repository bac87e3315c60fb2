//! Structure-function estimator of `h(q)`.
//!
//! `m(q, Δ)` is the mean of `|lv[kΔ] - lv[(k-1)Δ]|^q` over non-overlapping
//! lag-`Δ` increments; if `m(q, Δ) ~ c_q Δ^{ζ(q)}` then `h(q) = ζ(q) / q`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hurst::{ols, Estimator, HurstCurve, HurstPoint};
use crate::mfdfa::{geometric_s_grid, uniform_q_grid};
use crate::volseries::LogVolSeries;

pub const DEFAULT_SF_Q_RANGE: (f64, f64, f64) = (0.2, 8.0, 0.2);
pub const DEFAULT_SF_FIT_RANGE: (usize, usize) = (1, 40);

#[derive(Debug, Clone, PartialEq)]
pub struct SfConfig {
    /// Moment orders, all strictly positive.
    pub q_grid: Vec<f64>,
    /// Lags in days, strictly ascending.
    pub delta_grid: Vec<usize>,
    /// Inclusive lag window for the fit.
    pub fit_range: (usize, usize),
}

impl SfConfig {
    /// `q` in `(0, 8]` step 0.2, lags `1..=40` extended geometrically to
    /// `n / 10`, fit over `[1, 40]`.
    pub fn for_length(n: usize) -> Self {
        let (lo, hi, step) = DEFAULT_SF_Q_RANGE;
        Self {
            q_grid: uniform_q_grid(lo, hi, step).expect("default q grid is valid"),
            delta_grid: default_delta_grid(n, DEFAULT_SF_FIT_RANGE),
            fit_range: DEFAULT_SF_FIT_RANGE,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.q_grid.is_empty() {
            return Err(Error::invalid("q grid is empty"));
        }
        if let Some(q) = self.q_grid.iter().find(|q| !(**q > 0.0 && q.is_finite())) {
            return Err(Error::invalid(format!("structure functions need q > 0, got {q}")));
        }
        if self.delta_grid.is_empty() || self.delta_grid[0] == 0 {
            return Err(Error::invalid("lag grid must be non-empty with lags >= 1"));
        }
        if self.delta_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("lag grid must be strictly increasing"));
        }
        let max_delta = *self.delta_grid.last().expect("non-empty");
        let needed = 2 * max_delta + 1;
        if n < needed {
            return Err(Error::TooShort { needed, got: n });
        }
        let (lo, hi) = self.fit_range;
        if lo == 0 || lo >= hi {
            return Err(Error::invalid(format!("invalid lag fit window [{lo}, {hi}]")));
        }
        Ok(())
    }
}

/// Every lag in `fit_range` plus a geometric extension up to `n / 10`.
pub fn default_delta_grid(n: usize, fit_range: (usize, usize)) -> Vec<usize> {
    let (lo, hi) = fit_range;
    let mut grid: Vec<usize> = (lo..=hi).collect();
    let top = n / 10;
    if top > hi {
        grid.extend(geometric_s_grid(hi, top, 12).into_iter().filter(|&d| d > hi));
    }
    grid
}

fn moment(values: &[f64], q: f64, delta: usize) -> Result<f64> {
    let terms = values.len().saturating_sub(1) / delta.max(1);
    if terms < 2 {
        return Err(Error::TooShort { needed: 2 * delta + 1, got: values.len() });
    }
    let sum: f64 = values
        .iter()
        .step_by(delta)
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| (w[1] - w[0]).abs().powf(q))
        .sum();
    Ok(sum / terms as f64)
}

/// `m(q, Δ)`, the mean of the `q`-th absolute power of the non-overlapping
/// lag-`Δ` increments.
pub fn sf_moments(lv: &LogVolSeries, q: f64, delta: usize) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::invalid(format!("structure functions need q > 0, got {q}")));
    }
    if delta == 0 {
        return Err(Error::invalid("lag must be at least 1"));
    }
    moment(&lv.values(), q, delta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureFunctionTable {
    pub delta_grid: Vec<usize>,
    pub q_grid: Vec<f64>,
    /// `entries[i][j] = m(q_j, Δ_i)`.
    pub entries: Vec<Vec<f64>>,
    /// Increments averaged at each lag.
    pub n_terms: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaPoint {
    pub q: f64,
    pub zeta: f64,
    pub stderr: f64,
}

impl ZetaPoint {
    pub fn h(&self) -> f64 {
        self.zeta / self.q
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZetaCurve {
    pub points: Vec<ZetaPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SfAnalysis {
    pub table: StructureFunctionTable,
    pub zeta: ZetaCurve,
    pub curve: HurstCurve,
}

/// Fits `ln m(q, Δ) = ln c_q + ζ(q) ln Δ` over the lag window for each `q`.
pub fn sf_hurst(lv: &LogVolSeries, cfg: &SfConfig) -> Result<SfAnalysis> {
    let values = lv.values();
    cfg.validate(values.len())?;
    let entries = cfg
        .delta_grid
        .par_iter()
        .map(|&d| cfg.q_grid.iter().map(|&q| moment(&values, q, d)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let n_terms = cfg.delta_grid.iter().map(|&d| (values.len() - 1) / d).collect();
    let table = StructureFunctionTable {
        delta_grid: cfg.delta_grid.clone(),
        q_grid: cfg.q_grid.clone(),
        entries,
        n_terms,
    };

    let (lo, hi) = cfg.fit_range;
    let rows: Vec<(usize, &Vec<f64>)> = table
        .delta_grid
        .iter()
        .zip(&table.entries)
        .filter(|(&d, _)| d >= lo && d <= hi)
        .map(|(&d, row)| (d, row))
        .collect();
    if rows.len() < 3 {
        return Err(Error::InsufficientFitPoints { lo, hi, got: rows.len() });
    }
    let xs: Vec<f64> = rows.iter().map(|(d, _)| (*d as f64).ln()).collect();
    let mut zeta = Vec::with_capacity(cfg.q_grid.len());
    let mut points = Vec::with_capacity(cfg.q_grid.len());
    for (j, &q) in cfg.q_grid.iter().enumerate() {
        if let Some((d, _)) = rows.iter().find(|(_, row)| !(row[j] > 0.0)) {
            return Err(Error::NonFinite(format!("m(q={q}, Δ={d}) = 0; logarithm undefined")));
        }
        let ys: Vec<f64> = rows.iter().map(|(_, row)| row[j].ln()).collect();
        let fit = ols(&xs, &ys)?;
        zeta.push(ZetaPoint { q, zeta: fit.slope, stderr: fit.slope_stderr });
        points.push(HurstPoint { q, h: fit.slope / q, stderr: fit.slope_stderr / q, r2: fit.r2 });
    }
    Ok(SfAnalysis {
        table,
        zeta: ZetaCurve { points: zeta },
        curve: HurstCurve { points, estimator: Estimator::StructureFunction, fit_window: cfg.fit_range },
    })
}
