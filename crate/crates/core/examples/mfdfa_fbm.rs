//! Generalized Hurst exponents of fractional Gaussian noise.
//!
//! For a monofractal signal `h(q)` is flat at the generating Hurst exponent.
//!
//! ```text
//! cargo run --release --example mfdfa_fbm -- [hurst] [log2_n] [seed]
//! ```

use roughvol::mfdfa::{mfdfa_analyze, uniform_q_grid, MfdfaConfig};
use roughvol::synth::fbm_increments;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let hurst: f64 = args.first().map(|s| s.parse()).transpose()?.unwrap_or(0.14);
    let log2_n: u32 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(16);
    let seed: u64 = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(0);

    let x = fbm_increments(hurst, 1 << log2_n, seed)?;
    let cfg = MfdfaConfig::for_length(x.len()).with_q_grid(uniform_q_grid(-5.0, 5.0, 1.0)?);
    let analysis = mfdfa_analyze(&x, &cfg)?;

    println!("fGn H = {hurst}, n = {}, scales {:?}", x.len(), analysis.table.s_grid);
    println!("fit window s in [{}, {}]", cfg.fit_range.0, cfg.fit_range.1);
    println!("{:>6} {:>8} {:>8} {:>7}", "q", "h", "stderr", "r2");
    for p in &analysis.curve.points {
        println!("{:>6} {:>8.4} {:>8.4} {:>7.4}", p.q, p.h, p.stderr, p.r2);
    }
    Ok(())
}
