//! Repeated estimation on the short column: Monte Carlo against both
//! multifidelity allocations at six budgets.
//!
//! ```bash
//! cargo run --release --example short_column_experiment
//! ```

use mfmc::harness::{cmd_experiment, ExperimentConfig};

const CONFIG: &str = r#"
benchmark = "short-column"
stats_source = "paper"
pilot_size = 1000
budgets = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0]
n_runs = 1000
reference_samples = 1000000
seed = 7
"#;

fn main() -> mfmc::Result<()> {
    let cfg = ExperimentConfig::from_toml_str(CONFIG)?;
    let out = cmd_experiment(&cfg)?;
    println!("models {:?}", out.selected.statistics.ids);
    print!("{}", out.table.render_text());
    Ok(())
}
