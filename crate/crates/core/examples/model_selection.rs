//! Pick the cheapest-to-accurate model subset from published statistics.
//!
//! ```bash
//! cargo run --example model_selection
//! ```

use mfmc::benchmarks::{burgers_published_statistics, short_column_published_statistics};
use mfmc::{select_models, variance_ratio, EnsembleStatistics};

fn report(name: &str, stats: &EnsembleStatistics) -> mfmc::Result<()> {
    let sel = select_models(stats)?;
    let chosen = stats.subset(&sel.selected_indices)?;
    println!("{name}");
    println!("  selected {:?}", sel.selected_ids(stats));
    println!("  predicted variance at p = w1: {:.6} (plain Monte Carlo: 1)", sel.predicted_variance);
    println!("  root variance ratio against Monte Carlo: {:.4}", variance_ratio(&chosen)?);
    Ok(())
}

fn main() -> mfmc::Result<()> {
    // unit standard deviations: the argmin does not depend on σ₁
    report("short column", &short_column_published_statistics(&[1.0; 5])?)?;
    report("inviscid Burgers", &burgers_published_statistics(&[1.0; 5])?)?;
    Ok(())
}
