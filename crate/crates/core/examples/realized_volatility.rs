//! Daily realized variance and the volatility signature plot from a tick file.
//!
//! ```text
//! cargo run --example realized_volatility -- crates/core/tests/fixtures/ticks.csv [delta_t_minutes]
//! ```

use std::fs::File;

use roughvol::market_data::{parse_ticks, realized_variance, signature_curve, TickFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args.first().ok_or("usage: realized_volatility <ticks.csv> [delta_t_minutes]")?;
    let delta_t: u32 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(5);

    let ticks = parse_ticks(File::open(path)?, TickFormat::BitcoinchartsCsv)?;
    let report = ticks.report();
    println!(
        "{} ticks ({} malformed, {} non-positive, {} out of order)",
        ticks.len(),
        report.malformed_rows,
        report.non_positive_price_rows,
        report.out_of_order_rows
    );

    let rv = realized_variance(&ticks, delta_t, 100)?;
    println!("{} days with at least 100 ticks at delta_t = {delta_t} min", rv.len());
    for day in rv.days.iter().take(5) {
        println!("  {}  rv = {:.6e}  vol = {:.4}", day.date, day.rv, day.rv.sqrt());
    }

    println!("signature plot (mean daily RV by sampling interval):");
    for point in signature_curve(&ticks, &[1, 2, 5, 10, 15, 30, 60], 100)? {
        println!("  {:>3} min  {:.6e}", point.delta_t_minutes, point.mean_rv);
    }
    Ok(())
}
