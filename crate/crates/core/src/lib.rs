//! Roughness and multifractality of log-volatility.
//!
//! The crate turns trade ticks into daily realized variance, forms
//! log-volatility increments and estimates their generalized Hurst exponent
//! `h(q)` with multifractal detrended fluctuation analysis and with
//! structure functions. Singularity spectra, the `Δh`/`Δα` strength measures
//! and shuffle surrogates quantify how much of the multifractality comes from
//! temporal correlations and how much from the shape of the distribution.
//! The [`synth`] module provides processes with known exponents for
//! calibration.
//!
//! ```
//! use roughvol::{mfdfa, synth};
//!
//! let x = synth::fbm_increments(0.3, 1 << 14, 7).unwrap();
//! let cfg = mfdfa::MfdfaConfig::for_length(x.len()).with_q_grid(vec![-2.0, 2.0]);
//! let analysis = mfdfa::mfdfa_analyze(&x, &cfg).unwrap();
//! let h2 = analysis.curve.h_at(2.0).unwrap();
//! assert!((h2 - 0.3).abs() < 0.1);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod hurst;
pub mod io;
pub mod market_data;
pub mod mfdfa;
pub mod multifractal;
pub mod structure_function;
pub mod synth;
pub mod volseries;

pub use error::{Error, ErrorKind, Result};
pub use hurst::{Estimator, HurstCurve, HurstPoint};
