//! Structure-function scaling `m(q, Δ) ∝ Δ^ζ(q)` on an fBm path, compared
//! with MF-DFA on the corresponding increments.
//!
//! ```text
//! cargo run --release --example structure_function -- [hurst] [seed]
//! ```

use roughvol::mfdfa::{mfdfa_analyze, uniform_q_grid, MfdfaConfig};
use roughvol::structure_function::{sf_hurst, SfConfig};
use roughvol::synth::{fbm_increments, fbm_path};
use roughvol::volseries::LogVolSeries;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let hurst: f64 = args.first().map(|s| s.parse()).transpose()?.unwrap_or(0.2);
    let seed: u64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let n = 1 << 16;

    let q_grid = uniform_q_grid(0.5, 4.0, 0.5)?;
    let path = LogVolSeries::from_values(&fbm_path(hurst, n, seed)?);
    let mut sf_cfg = SfConfig::for_length(n);
    sf_cfg.q_grid = q_grid.clone();
    let sf = sf_hurst(&path, &sf_cfg)?;

    let inc = fbm_increments(hurst, n, seed)?;
    let md = mfdfa_analyze(&inc, &MfdfaConfig::for_length(n).with_q_grid(q_grid))?;

    println!("fBm H = {hurst}, n = {n}");
    println!("{:>5} {:>8} {:>8} {:>8}", "q", "zeta", "h_sf", "h_mfdfa");
    for (z, p) in sf.zeta.points.iter().zip(&md.curve.points) {
        println!("{:>5} {:>8.4} {:>8.4} {:>8.4}", z.q, z.zeta, z.h(), p.h);
    }
    Ok(())
}
