//! End-to-end analysis: ticks → daily RV → log-volatility increments →
//! MF-DFA, structure functions, singularity spectrum and shuffle ensemble.
//!
//! With no argument a synthetic rough-volatility tick history is generated
//! in memory.
//!
//! ```text
//! cargo run --release --example log_volatility_pipeline -- [ticks.csv]
//! ```

use std::fs::File;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use roughvol::market_data::{parse_ticks, realized_variance, Tick, TickFormat, TickSeries};
use roughvol::mfdfa::{mfdfa_analyze, MfdfaConfig};
use roughvol::multifractal::{format_uncertainty, shuffle_ensemble, singularity_spectrum};
use roughvol::structure_function::{sf_hurst, SfConfig};
use roughvol::synth::fbm_path;
use roughvol::volseries::{distribution_summary, increments, log_vol};

fn synthetic_ticks(days: usize, per_day: usize) -> roughvol::Result<TickSeries> {
    let level = fbm_path(0.14, days.next_power_of_two(), 7)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut log_p = 8.0f64;
    let mut ticks = Vec::with_capacity(days * per_day);
    for (d, l) in level.iter().take(days).enumerate() {
        let sigma = (-3.5 + 0.3 * l).exp() / (per_day as f64).sqrt();
        let mut times: Vec<i64> = (0..per_day).map(|_| rng.random_range(0..86_400)).collect();
        times.sort_unstable();
        for t in times {
            let z: f64 = StandardNormal.sample(&mut rng);
            log_p += sigma * z;
            ticks.push(Tick { timestamp: 1_420_070_400 + d as i64 * 86_400 + t, price: log_p.exp(), volume: 1.0 });
        }
    }
    TickSeries::new("synthetic", ticks)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ticks = match std::env::args().nth(1) {
        Some(path) => parse_ticks(File::open(path)?, TickFormat::BitcoinchartsCsv)?,
        None => synthetic_ticks(2048, 300)?,
    };
    let rv = realized_variance(&ticks, 5, 100)?;
    let lv = log_vol(&rv)?;
    let inc = increments(&lv, 1)?;
    println!("{} ticks, {} days, {} increments", ticks.len(), rv.len(), inc.len());

    let dist = distribution_summary(&inc, 40)?;
    println!("increments: mean {:.4}, std {:.4}, kurtosis {:.3}", dist.mean, dist.std, dist.kurtosis);

    let cfg = MfdfaConfig::for_length(inc.len());
    let curve = mfdfa_analyze(&inc.values, &cfg)?.curve;
    let spectrum = singularity_spectrum(&curve)?;
    let sf = sf_hurst(&lv, &SfConfig::for_length(lv.len()))?;
    println!("{:>5} {:>8} {:>8}", "q", "h_mfdfa", "h_sf");
    for q in [1.0, 2.0, 3.0, 4.0] {
        let h_sf = sf.curve.h_at(q).unwrap_or(f64::NAN);
        println!("{q:>5} {:>8.3} {h_sf:>8.3}", curve.h_at(q).unwrap_or(f64::NAN));
    }
    println!("delta_h = {:.3}, delta_alpha = {:.3}", spectrum.delta_h, spectrum.delta_alpha);

    let shuffled = shuffle_ensemble(&inc, &cfg, 20, 0)?;
    if let Some(e) = shuffled.at(2.0) {
        println!("shuffled h(2) = {}", format_uncertainty(e.mean_h, e.std_h));
    }
    println!(
        "shuffled delta_h = {}, delta_alpha = {}",
        format_uncertainty(shuffled.delta_h_mean, shuffled.delta_h_std),
        format_uncertainty(shuffled.delta_alpha_mean, shuffled.delta_alpha_std)
    );
    Ok(())
}
