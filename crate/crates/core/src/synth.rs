//! Synthetic series with known scaling exponents.
//!
//! * fractional Gaussian noise (increments of fBm), exact covariance via
//!   circulant embedding;
//! * Gaussian white noise;
//! * the deterministic binomial multiplicative cascade, whose MF-DFA
//!   exponents are known in closed form.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};

pub const MAX_CASCADE_LEVELS: u32 = 26;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthSpec {
    Fbm { hurst: f64, n: usize, seed: u64 },
    GaussianWhite { n: usize, seed: u64 },
    BinomialCascade { a: f64, levels: u32 },
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SynthSpec::Fbm { hurst, n, .. } => {
                check_hurst(hurst)?;
                check_power_of_two(n)
            }
            SynthSpec::GaussianWhite { n, .. } => {
                if n == 0 {
                    return Err(Error::invalid("length must be positive"));
                }
                Ok(())
            }
            SynthSpec::BinomialCascade { a, levels } => check_cascade(a, levels),
        }
    }

    pub fn generate(&self) -> Result<Vec<f64>> {
        match *self {
            SynthSpec::Fbm { hurst, n, seed } => fbm_increments(hurst, n, seed),
            SynthSpec::GaussianWhite { n, seed } => {
                self.validate()?;
                Ok(gaussian_white(n, seed))
            }
            SynthSpec::BinomialCascade { a, levels } => binomial_cascade(a, levels),
        }
    }
}

fn check_hurst(hurst: f64) -> Result<()> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::invalid(format!("hurst must lie strictly inside (0, 1), got {hurst}")));
    }
    Ok(())
}

fn check_power_of_two(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::invalid(format!("length must be a power of two >= 2, got {n}")));
    }
    Ok(())
}

fn check_cascade(a: f64, levels: u32) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::invalid(format!("cascade multiplier must lie strictly inside (0, 1), got {a}")));
    }
    if levels > MAX_CASCADE_LEVELS {
        return Err(Error::invalid(format!("at most {MAX_CASCADE_LEVELS} cascade levels, got {levels}")));
    }
    Ok(())
}

/// Unit-variance fGn autocovariance `½(|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H})`.
pub fn fgn_autocovariance(hurst: f64, k: usize) -> f64 {
    let two_h = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

/// `n` samples of unit-variance fractional Gaussian noise with Hurst
/// exponent `hurst`, i.e. the increments of fractional Brownian motion.
///
/// Uses circulant embedding of size `2n` (Davies-Harte / Wood-Chan). The
/// embedding is non-negative definite for fGn; negative eigenvalues from
/// rounding are clipped, and a warning is logged if any clipped eigenvalue is
/// large enough to make the sample approximate.
pub fn fbm_increments(hurst: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    check_hurst(hurst)?;
    check_power_of_two(n)?;
    let m = 2 * n;
    let mut row: Vec<Complex<f64>> = (0..=n)
        .map(|k| Complex::new(fgn_autocovariance(hurst, k), 0.0))
        .collect();
    row.extend((1..n).rev().map(|k| Complex::new(fgn_autocovariance(hurst, k), 0.0)));

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);

    let largest = row.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
    let worst = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
    if worst < -1e-10 * largest {
        log::warn!(
            "circulant embedding for H={hurst}, n={n} is not non-negative definite \
             (min eigenvalue {worst:e}); clipping, sample covariance is approximate"
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / m as f64;
    let mut w: Vec<Complex<f64>> = row
        .iter()
        .map(|lambda| {
            let amp = (lambda.re.max(0.0) * scale).sqrt();
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex::new(amp * re, amp * im)
        })
        .collect();
    fft.process(&mut w);
    Ok(w[..n].iter().map(|c| c.re).collect())
}

/// Cumulative sum of [`fbm_increments`]: an fBm path sampled at `1..=n`.
pub fn fbm_path(hurst: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    let inc = fbm_increments(hurst, n, seed)?;
    Ok(inc
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect())
}

/// `n` i.i.d. standard normal draws.
pub fn gaussian_white(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Deterministic binomial measure on `2^levels` cells.
///
/// Starting from `[1]`, every weight `w` is replaced by `(a w, (1 - a) w)`
/// `levels` times. The weights sum to one.
pub fn binomial_cascade(a: f64, levels: u32) -> Result<Vec<f64>> {
    check_cascade(a, levels)?;
    let mut weights = vec![1.0];
    for _ in 0..levels {
        weights = weights.iter().flat_map(|&w| [w * a, w * (1.0 - a)]).collect();
    }
    Ok(weights)
}

/// `h(q) = 1/q - ln(a^q + (1-a)^q) / (q ln 2)` for the binomial cascade.
///
/// At `q = 0` the removable singularity is replaced by its limit
/// `-(ln a + ln(1-a)) / (2 ln 2)`.
pub fn cascade_hurst_analytic(a: f64, q: f64) -> f64 {
    let b = 1.0 - a;
    if q == 0.0 {
        return -(a.ln() + b.ln()) / (2.0 * std::f64::consts::LN_2);
    }
    1.0 / q - log_sum_pow(a, b, q) / (q * std::f64::consts::LN_2)
}

/// Hölder exponent `α(q) = d(q h(q))/dq` of the binomial cascade.
pub fn cascade_alpha_analytic(a: f64, q: f64) -> f64 {
    let b = 1.0 - a;
    // weights a^q / (a^q + b^q), evaluated stably
    let wa = 1.0 / (1.0 + ((b / a).ln() * q).exp());
    let wb = 1.0 - wa;
    -(wa * a.ln() + wb * b.ln()) / std::f64::consts::LN_2
}

/// Limits of `α(q)` as `q -> +inf` and `q -> -inf`.
pub fn cascade_alpha_bounds(a: f64) -> (f64, f64) {
    let hi = a.max(1.0 - a);
    let lo = a.min(1.0 - a);
    (-hi.log2(), -lo.log2())
}

/// `ln(a^q + b^q)` without overflow for large `|q|`.
fn log_sum_pow(a: f64, b: f64, q: f64) -> f64 {
    let (la, lb) = (q * a.ln(), q * b.ln());
    let peak = la.max(lb);
    peak + ((la - peak).exp() + (lb - peak).exp()).ln()
}
