//! Drive the pipeline from a TOML configuration and write the result files.
//!
//! ```bash
//! cargo run --release --example config_driven -- path/to/config.toml
//! ```
//!
//! Without an argument a small Burgers run with published statistics is used.

use mfmc::harness::{cmd_experiment, write_experiment_outputs, ExperimentConfig};

const DEFAULT: &str = r#"
benchmark = "burgers"
stats_source = "paper"
models = [1, 4, 2]
budgets = [2.0, 8.0, 32.0]
n_runs = 50
reference_samples = 20000
seed = 5
"#;

fn main() -> mfmc::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => ExperimentConfig::load(path.as_ref())?,
        None => ExperimentConfig::from_toml_str(DEFAULT)?,
    };
    let out = cmd_experiment(&cfg)?;
    print!("{}", out.table.render_text());
    let dir = std::env::temp_dir().join("mfmc-config-driven");
    for path in write_experiment_outputs(&out, &dir, true)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
