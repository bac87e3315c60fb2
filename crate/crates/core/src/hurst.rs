//! Generalized Hurst exponent curves and the log-log regression shared by
//! both estimators.

use serde::Serialize;

use crate::error::{Error, Result};

/// Which estimator produced a [`HurstCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Mfdfa,
    StructureFunction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurstPoint {
    pub q: f64,
    pub h: f64,
    pub stderr: f64,
    pub r2: f64,
}

/// `q -> h(q)` with per-point fit diagnostics, ordered by `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct HurstCurve {
    pub points: Vec<HurstPoint>,
    pub estimator: Estimator,
    /// Inclusive window of scales (MF-DFA) or lags (structure function) used by the fits.
    pub fit_window: (usize, usize),
}

impl HurstCurve {
    pub fn qs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.q).collect()
    }

    pub fn hs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.h).collect()
    }

    /// `h` at the grid point closest to `q`, if one lies within `1e-9`.
    pub fn h_at(&self, q: f64) -> Option<f64> {
        self.point_at(q).map(|p| p.h)
    }

    pub fn point_at(&self, q: f64) -> Option<&HurstPoint> {
        self.points.iter().find(|p| (p.q - q).abs() < 1e-9)
    }

    /// Restricts the curve to `q_lo <= q <= q_hi`.
    pub fn restricted(&self, q_lo: f64, q_hi: f64) -> HurstCurve {
        HurstCurve {
            points: self
                .points
                .iter()
                .filter(|p| p.q >= q_lo - 1e-9 && p.q <= q_hi + 1e-9)
                .copied()
                .collect(),
            estimator: self.estimator,
            fit_window: self.fit_window,
        }
    }
}

/// Ordinary least squares `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r2: f64,
}

/// Equal-weight OLS. Needs at least three points with distinct `x`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    assert_eq!(x.len(), y.len(), "ols: mismatched lengths");
    let n = x.len();
    if n < 3 {
        return Err(Error::TooShort { needed: 3, got: n });
    }
    if let Some(bad) = x.iter().chain(y).find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("regression input contains {bad}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::invalid("regression abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let slope_stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    let r2 = if syy > 0.0 { (1.0 - ssr / syy).max(0.0) } else { 1.0 };
    Ok(LinearFit { slope, intercept, slope_stderr, r2 })
}
