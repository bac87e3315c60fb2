//! Singularity spectrum of a deterministic binomial cascade against its
//! closed form.
//!
//! ```text
//! cargo run --release --example singularity_spectrum -- [a] [levels]
//! ```

use roughvol::mfdfa::{mfdfa_analyze, uniform_q_grid, MfdfaConfig};
use roughvol::multifractal::singularity_spectrum;
use roughvol::synth::{binomial_cascade, cascade_alpha_analytic, cascade_alpha_bounds, cascade_hurst_analytic};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let a: f64 = args.first().map(|s| s.parse()).transpose()?.unwrap_or(0.6);
    let levels: u32 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(16);

    let x = binomial_cascade(a, levels)?;
    // dyadic scales match the cascade's own self-similarity
    let s_grid: Vec<usize> = (4..levels.saturating_sub(1)).map(|k| 1usize << k).collect();
    let fit_range = (s_grid[2], *s_grid.last().ok_or("too few levels")?);
    let cfg = MfdfaConfig { q_grid: uniform_q_grid(-10.0, 10.0, 0.5)?, s_grid, fit_range, poly_order: 3 };
    let curve = mfdfa_analyze(&x, &cfg)?.curve;
    let spectrum = singularity_spectrum(&curve)?;

    println!("binomial cascade a = {a}, {levels} levels ({} points)", x.len());
    println!("{:>6} {:>8} {:>8} {:>8} {:>8} {:>8}", "q", "h", "h_exact", "alpha", "a_exact", "f");
    for (p, s) in curve.points.iter().zip(&spectrum.points).step_by(4) {
        println!(
            "{:>6} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            p.q,
            p.h,
            cascade_hurst_analytic(a, p.q),
            s.alpha,
            cascade_alpha_analytic(a, p.q),
            s.f_alpha
        );
    }
    let (lo, hi) = cascade_alpha_bounds(a);
    println!("delta_h = {:.4}, delta_alpha = {:.4}", spectrum.delta_h, spectrum.delta_alpha);
    println!("alpha support as q -> ±inf: [{lo:.4}, {hi:.4}]");
    Ok(())
}
