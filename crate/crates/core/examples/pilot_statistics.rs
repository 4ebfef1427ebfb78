//! Draw a pilot sample of the short-column ensemble and estimate σ, ρ and costs.
//!
//! ```bash
//! cargo run --release --example pilot_statistics
//! ```

use mfmc::benchmarks::{short_column_input, short_column_models};
use mfmc::{draw_pilot, estimate_statistics, LogNormalConvention, Model};

fn main() -> mfmc::Result<()> {
    let models = short_column_models();
    let refs: Vec<&dyn Model> = models.iter().map(|m| m as &dyn Model).collect();
    let input = short_column_input(LogNormalConvention::UnderlyingNormal);

    let pilot = draw_pilot(&refs, &input, 1000, 2024)?;
    let costs: Vec<f64> = refs.iter().map(|m| m.cost()).collect();
    let stats = estimate_statistics(&pilot, &costs)?;

    println!("{:>4} {:>8} {:>14} {:>12}", "id", "cost", "sigma", "rho with f1");
    for i in 0..stats.k() {
        println!("{:>4} {:>8} {:>14.6e} {:>12.8}", stats.ids[i], stats.costs[i], stats.sigma[i], stats.rho1[i]);
    }

    let path = std::env::temp_dir().join("short_column_pilot.csv");
    pilot.write_csv(std::fs::File::create(&path)?)?;
    println!("pilot matrix ({} x {}) written to {}", pilot.rows(), pilot.models(), path.display());
    Ok(())
}
