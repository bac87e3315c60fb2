//! Shuffle surrogates: destroying temporal order removes correlation-driven
//! roughness and multifractality but keeps whatever the marginal
//! distribution carries.
//!
//! ```text
//! cargo run --release --example shuffle_attribution -- [replicates] [seed]
//! ```

use roughvol::mfdfa::{mfdfa_analyze, uniform_q_grid, MfdfaConfig};
use roughvol::multifractal::{format_uncertainty, shuffle_ensemble, singularity_spectrum};
use roughvol::synth::{binomial_cascade, fbm_increments};
use roughvol::volseries::IncrementSeries;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let replicates: usize = args.first().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let seed: u64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let n = 1 << 16;
    let cfg = MfdfaConfig::for_length(n).with_q_grid(uniform_q_grid(-10.0, 10.0, 0.5)?);

    let signals = [
        ("fGn H=0.2", fbm_increments(0.2, n, seed)?),
        ("cascade a=0.6", binomial_cascade(0.6, 16)?),
    ];
    for (label, values) in signals {
        let original = mfdfa_analyze(&values, &cfg)?.curve;
        let spectrum = singularity_spectrum(&original)?;
        let inc = IncrementSeries::new(values, 1, label);
        let shuffled = shuffle_ensemble(&inc, &cfg, replicates, seed)?;
        let h2 = shuffled.at(2.0).ok_or("q = 2 not on grid")?;

        println!("{label}");
        println!("  original: h(2) = {:.3}, delta_h = {:.3}", original.h_at(2.0).unwrap_or(f64::NAN), spectrum.delta_h);
        println!(
            "  shuffled: h(2) = {}, delta_h = {}, delta_alpha = {}",
            format_uncertainty(h2.mean_h, h2.std_h),
            format_uncertainty(shuffled.delta_h_mean, shuffled.delta_h_std),
            format_uncertainty(shuffled.delta_alpha_mean, shuffled.delta_alpha_std)
        );
    }
    Ok(())
}
