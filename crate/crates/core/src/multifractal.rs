//! Strength of multifractality: singularity spectrum, `Δh`, `Δα`, and the
//! shuffle-surrogate ensemble that separates correlation-driven from
//! distribution-driven multifractality.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hurst::HurstCurve;
use crate::mfdfa::{mfdfa_analyze, MfdfaConfig};
use crate::volseries::{shuffle, IncrementSeries};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub q: f64,
    pub alpha: f64,
    pub f_alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularitySpectrum {
    pub points: Vec<SpectrumPoint>,
    /// `max α - min α`.
    pub delta_alpha: f64,
    /// `h(q_min) - h(q_max)` over the curve's q range.
    pub delta_h: f64,
}

/// `α = h + q h'(q)` and `f(α) = q (α - h) + 1` on a uniform q grid.
///
/// `h'` uses central differences at interior points and one-sided
/// differences at the two ends.
pub fn singularity_spectrum(curve: &HurstCurve) -> Result<SingularitySpectrum> {
    let qs = curve.qs();
    let hs = curve.hs();
    let n = qs.len();
    if n < 3 {
        return Err(Error::TooShort { needed: 3, got: n });
    }
    let step = qs[1] - qs[0];
    let tol = 1e-9 * step.abs().max(1.0);
    if !(step > 0.0) || qs.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > tol) {
        return Err(Error::NonUniformGrid(format!(
            "expected constant spacing {step}, resample the curve first"
        )));
    }
    let derivative = |i: usize| -> f64 {
        match i {
            0 => (hs[1] - hs[0]) / step,
            i if i == n - 1 => (hs[n - 1] - hs[n - 2]) / step,
            i => (hs[i + 1] - hs[i - 1]) / (2.0 * step),
        }
    };
    let points: Vec<SpectrumPoint> = (0..n)
        .map(|i| {
            let alpha = hs[i] + qs[i] * derivative(i);
            SpectrumPoint { q: qs[i], alpha, f_alpha: qs[i] * (alpha - hs[i]) + 1.0 }
        })
        .collect();
    let a_max = points.iter().map(|p| p.alpha).fold(f64::NEG_INFINITY, f64::max);
    let a_min = points.iter().map(|p| p.alpha).fold(f64::INFINITY, f64::min);
    Ok(SingularitySpectrum { points, delta_alpha: a_max - a_min, delta_h: hs[0] - hs[n - 1] })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleQ {
    pub q: f64,
    pub mean_h: f64,
    /// Sample standard deviation across replicates.
    pub std_h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShuffleEnsembleResult {
    pub n_replicates: usize,
    pub per_q: Vec<EnsembleQ>,
    pub delta_h_mean: f64,
    pub delta_h_std: f64,
    pub delta_alpha_mean: f64,
    pub delta_alpha_std: f64,
    pub seeds: Vec<u64>,
}

impl ShuffleEnsembleResult {
    pub fn at(&self, q: f64) -> Option<&EnsembleQ> {
        self.per_q.iter().find(|e| (e.q - q).abs() < 1e-9)
    }
}

/// Runs MF-DFA and the singularity spectrum on `n_replicates` shuffles of
/// `inc`; replicate `i` uses seed `base_seed + i`.
pub fn shuffle_ensemble(
    inc: &IncrementSeries,
    cfg: &MfdfaConfig,
    n_replicates: usize,
    base_seed: u64,
) -> Result<ShuffleEnsembleResult> {
    let seeds: Vec<u64> = (0..n_replicates as u64).map(|i| base_seed.wrapping_add(i)).collect();
    shuffle_ensemble_with_seeds(inc, cfg, &seeds)
}

/// As [`shuffle_ensemble`] with an explicit seed per replicate.
pub fn shuffle_ensemble_with_seeds(
    inc: &IncrementSeries,
    cfg: &MfdfaConfig,
    seeds: &[u64],
) -> Result<ShuffleEnsembleResult> {
    if seeds.len() < 2 {
        return Err(Error::invalid(format!(
            "shuffle ensemble needs at least 2 replicates for a standard deviation, got {}",
            seeds.len()
        )));
    }
    if inc.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    cfg.validate(inc.len())?;

    let replicates = seeds
        .par_iter()
        .map(|&seed| {
            let run = || -> Result<(HurstCurve, SingularitySpectrum)> {
                let curve = mfdfa_analyze(&shuffle(inc, seed).values, cfg)?.curve;
                let spectrum = singularity_spectrum(&curve)?;
                Ok((curve, spectrum))
            };
            run().map_err(|e| Error::Replicate { seed, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;

    let per_q = cfg
        .q_grid
        .iter()
        .enumerate()
        .map(|(j, &q)| {
            let hs: Vec<f64> = replicates.iter().map(|(c, _)| c.points[j].h).collect();
            let (mean_h, std_h) = mean_std(&hs);
            EnsembleQ { q, mean_h, std_h }
        })
        .collect();
    let dh: Vec<f64> = replicates.iter().map(|(_, s)| s.delta_h).collect();
    let da: Vec<f64> = replicates.iter().map(|(_, s)| s.delta_alpha).collect();
    let (delta_h_mean, delta_h_std) = mean_std(&dh);
    let (delta_alpha_mean, delta_alpha_std) = mean_std(&da);
    Ok(ShuffleEnsembleResult {
        n_replicates: seeds.len(),
        per_q,
        delta_h_mean,
        delta_h_std,
        delta_alpha_mean,
        delta_alpha_std,
        seeds: seeds.to_vec(),
    })
}

fn mean_std(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Renders `value` to three decimals followed by `std` in units of the last
/// digit, e.g. `0.515(21)`.
pub fn format_uncertainty(value: f64, std: f64) -> String {
    let digits = (std.max(0.0) * 1000.0).round() as u64;
    format!("{value:.3}({digits})")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hurst::{Estimator, HurstPoint};

    fn curve(qs: &[f64], h: impl Fn(f64) -> f64) -> HurstCurve {
        HurstCurve {
            points: qs.iter().map(|&q| HurstPoint { q, h: h(q), stderr: 0.0, r2: 1.0 }).collect(),
            estimator: Estimator::Mfdfa,
            fit_window: (80, 280),
        }
    }

    #[test]
    fn monofractal_spectrum_collapses() {
        let qs: Vec<f64> = (-50..=50).map(|i| i as f64 * 0.5).collect();
        let s = singularity_spectrum(&curve(&qs, |_| 0.3)).unwrap();
        assert_eq!(s.delta_alpha, 0.0);
        assert_eq!(s.delta_h, 0.0);
        assert!(s.points.iter().all(|p| p.alpha == 0.3 && p.f_alpha == 1.0));
    }

    #[test]
    fn apex_at_q_zero() {
        let qs: Vec<f64> = (-10..=10).map(|i| i as f64 * 0.5).collect();
        let s = singularity_spectrum(&curve(&qs, |q| 0.5 - 0.02 * q + 0.001 * q * q)).unwrap();
        let apex = s.points.iter().find(|p| p.q == 0.0).unwrap();
        assert_eq!(apex.f_alpha, 1.0);
        assert!(s.points.iter().all(|p| p.f_alpha <= 1.0 + 1e-12));
    }

    #[test]
    fn linear_h_gives_exact_alpha() {
        // h = a + b q  =>  α = a + 2 b q, exact under central and one-sided differences
        let qs: Vec<f64> = (0..9).map(|i| -2.0 + i as f64 * 0.5).collect();
        let s = singularity_spectrum(&curve(&qs, |q| 0.4 - 0.05 * q)).unwrap();
        for p in &s.points {
            assert!((p.alpha - (0.4 - 0.1 * p.q)).abs() < 1e-14);
        }
        assert!((s.delta_h - 0.2).abs() < 1e-14);
        assert!((s.delta_alpha - 0.4).abs() < 1e-14);
    }

    #[test]
    fn non_uniform_grid_rejected() {
        let err = singularity_spectrum(&curve(&[0.0, 1.0, 3.0], |_| 0.5)).unwrap_err();
        assert!(matches!(err, Error::NonUniformGrid(_)));
        assert!(singularity_spectrum(&curve(&[0.0, 1.0], |_| 0.5)).is_err());
    }

    #[test]
    fn uncertainty_formatting() {
        assert_eq!(format_uncertainty(0.5154, 0.0212), "0.515(21)");
        assert_eq!(format_uncertainty(0.5, 0.0), "0.500(0)");
        assert_eq!(format_uncertainty(0.1337, 0.0049), "0.134(5)");
    }

    #[test]
    fn equal_seeds_give_zero_spread() {
        let x: Vec<f64> = (0..600).map(|i| ((i * 37 % 101) as f64 - 50.0) / 7.0).collect();
        let inc = IncrementSeries::new(x, 1, "t");
        let cfg = MfdfaConfig::for_length(600)
            .with_q_grid(vec![-2.0, 0.0, 2.0])
            .with_fit_range(600, (20, 100));
        let r = shuffle_ensemble_with_seeds(&inc, &cfg, &[5, 5]).unwrap();
        assert!(r.per_q.iter().all(|e| e.std_h == 0.0));
        assert_eq!(r.delta_h_std, 0.0);
        assert!(shuffle_ensemble(&inc, &cfg, 1, 0).is_err());
    }
}
