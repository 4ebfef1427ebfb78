//! Build POD reduced-order models of the inviscid Burgers equation and compare
//! them with the full model.
//!
//! ```bash
//! cargo run --release --example burgers_rom
//! ```

use std::time::Instant;

use mfmc::benchmarks::burgers::{burgers_qoi, burgers_solve, BurgersConfig};
use mfmc::benchmarks::{BurgersEnsemble, BurgersOptions};
use mfmc::{draw_pilot, estimate_statistics, Model, SeedStream};

fn main() -> mfmc::Result<()> {
    let options = BurgersOptions::default();
    let start = Instant::now();
    let ens = BurgersEnsemble::build(&options, 1)?;
    println!(
        "snapshot basis from {} training runs: numerical rank {}, built in {:.2?}",
        ens.training.len(),
        ens.pod.rank(),
        start.elapsed()
    );

    let z = ens.sample_parameter(&mut SeedStream::new(2).rng());
    println!("z = ({:.4}, {:.6})", z[0], z[1]);
    println!("  {:>4}: {:.10}", "FOM", burgers_qoi(&options.config, &z)?);
    for rom in &ens.roms {
        println!("  d={:>2}: {:.10}", rom.basis.dim(), rom.evaluate(&z)?);
    }

    let models = ens.models();
    let pilot = draw_pilot(&models, &ens.input, 100, 3)?;
    let costs: Vec<f64> = models.iter().map(|m| m.cost()).collect();
    let stats = estimate_statistics(&pilot, &costs)?;
    println!("pilot correlations with the FOM: {:?}", stats.rho1);

    let reps = 200;
    for m in &models {
        let t = Instant::now();
        for _ in 0..reps {
            m.evaluate(&z)?;
        }
        println!("  {} measured {:.3e} s per evaluation (nominal {:.3e})", m.id(), t.elapsed().as_secs_f64() / reps as f64, m.cost());
    }

    let config = BurgersConfig::default();
    let traj = burgers_solve(&config, &[2.75, 0.0275])?;
    let path = std::env::temp_dir().join("burgers_profiles.csv");
    traj.write_profiles_csv(&config, &[20, 60, 100], std::fs::File::create(&path)?)?;
    println!("profiles at t = 2, 6, 10 written to {} (max CFL {:.3})", path.display(), traj.max_cfl);
    Ok(())
}
