//! Writes a synthetic bitcoincharts-style tick file.
//!
//! Daily log-volatility follows a rough fBm path; within each day trades
//! arrive at random times and the log price is a Gaussian random walk whose
//! daily variance is that day's squared volatility.
//!
//! ```text
//! cargo run --example synthetic_ticks -- ticks.csv [days] [ticks_per_day] [seed]
//! ```

use std::fs::File;
use std::io::{BufWriter, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use roughvol::synth;

const START: i64 = 1_420_070_400; // 2015-01-01T00:00:00Z

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = args.first().map(String::as_str).unwrap_or("ticks.csv");
    let days: usize = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(160);
    let per_day: usize = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(120);
    let seed: u64 = args.get(3).map(|s| s.parse()).transpose()?.unwrap_or(1);

    let n = days.next_power_of_two().max(2);
    let path = synth::fbm_path(0.15, n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = BufWriter::new(File::create(out)?);
    let mut log_price = (250.0f64).ln();
    let mut rows = 0;
    for (day, level) in path.iter().take(days).enumerate() {
        let sigma = (-3.5 + 0.3 * level).exp();
        // every 23rd day is thin and falls below the default tick filter
        let count = if day % 23 == 22 { per_day / 10 } else { per_day };
        let mut times: Vec<i64> = (0..count).map(|_| rng.random_range(0..86_400)).collect();
        times.sort_unstable();
        let step = sigma / (count as f64).sqrt();
        for t in times {
            let z: f64 = StandardNormal.sample(&mut rng);
            log_price += step * z;
            let volume: f64 = rng.random_range(0.01..2.0);
            writeln!(w, "{},{:.2},{:.4}", START + day as i64 * 86_400 + t, log_price.exp(), volume)?;
            rows += 1;
        }
    }
    w.flush()?;
    println!("wrote {rows} ticks over {days} days to {out}");
    Ok(())
}
