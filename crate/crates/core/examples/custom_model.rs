//! Plug your own models into the estimator.
//!
//! ```bash
//! cargo run --example custom_model
//! ```

use mfmc::experiment::{reference_value, run_plan};
use mfmc::{
    allocate_mc, allocate_modified, draw_pilot, estimate_statistics, mfmc_estimate, select_models, FnModel,
    InputDistribution, Model, RandomInputSpec, SeedStream,
};

fn main() -> mfmc::Result<()> {
    // E[sin(z₁) + z₂²] with z₁ ~ U[0, π], z₂ ~ N(0, 1); the exact value is 2/π + 1
    let fine = FnModel::new("fine", 1.0, |z: &[f64]| z[0].sin() + z[1] * z[1]);
    let taylor = FnModel::new("taylor", 0.05, |z: &[f64]| {
        let x = z[0] - std::f64::consts::FRAC_PI_2;
        1.0 - x * x / 2.0 + z[1] * z[1]
    });
    let crude = FnModel::new("crude", 0.01, |z: &[f64]| 0.6 + z[1] * z[1]);
    let models: Vec<&dyn Model> = vec![&fine, &taylor, &crude];
    let input = RandomInputSpec::new(vec![
        InputDistribution::Uniform { low: 0.0, high: std::f64::consts::PI },
        InputDistribution::Normal { mean: 0.0, std_dev: 1.0 },
    ])?;

    let pilot = draw_pilot(&models, &input, 5000, 1)?;
    let stats = estimate_statistics(&pilot, &models.iter().map(|m| m.cost()).collect::<Vec<_>>())?;
    let sel = select_models(&stats)?;
    let chosen = stats.subset(&sel.selected_indices)?;
    let picked: Vec<&dyn Model> = sel.selected_indices.iter().map(|&i| models[i]).collect();
    println!("rho {:?}, selected {:?}", stats.rho1, chosen.ids);

    let budget = 50.0;
    let plan = allocate_modified(&chosen, budget)?;
    let one = mfmc_estimate(&picked, &plan, &input, 9)?;
    println!("plan {:?}: estimate {:.5} at cost {:.2}", plan.m, one.value, one.cost);

    let exact = 2.0 / std::f64::consts::PI + 1.0;
    let runs = 2000;
    let root = SeedStream::new(10);
    for p in [allocate_mc(&chosen, budget)?, plan] {
        let values = run_plan(&picked, &p, &input, |j| root.child(j as u64).seed(), runs)?;
        let mse = values.iter().map(|v| (v - exact).powi(2)).sum::<f64>() / runs as f64;
        println!("{:>9}: empirical MSE {mse:.3e}, predicted {:.3e}", p.method, p.predicted_mse);
    }
    println!("reference from 1e6 samples: {:.5} (exact {exact:.5})", reference_value(&fine, &input, 1_000_000, 11)?);
    Ok(())
}
