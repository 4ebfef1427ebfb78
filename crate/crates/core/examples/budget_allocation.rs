//! Integer sample counts that never exceed the budget, next to naive rounding
//! and an exhaustive search.
//!
//! ```bash
//! cargo run --example budget_allocation
//! ```

use mfmc::allocation::pinning_sequence;
use mfmc::benchmarks::short_column_published_statistics;
use mfmc::{allocate_mc, allocate_modified, allocate_naive_rounded, brute_force_mip};

fn main() -> mfmc::Result<()> {
    let stats = short_column_published_statistics(&[1.0; 5])?.subset(&[0, 1, 4])?;
    let w1 = stats.costs[0];

    println!("{:>5} {:>16} {:>8} {:>16} {:>8} {:>12}", "p/w1", "modified", "p_eff", "naive", "p_eff", "MC n");
    for b in [2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
        let p = b * w1;
        let m = allocate_modified(&stats, p)?;
        let n = allocate_naive_rounded(&stats, p)?;
        let mc = allocate_mc(&stats, p)?;
        println!(
            "{b:>5} {:>16} {:>8.2} {:>16} {:>8.2} {:>12}",
            format!("{:?}", m.m),
            m.effective_budget(w1),
            format!("{:?}", n.m),
            n.effective_budget(w1),
            mc.m[0]
        );
    }

    let p = 4.0 * w1;
    println!("\npinning at p = 4 w1:");
    for step in pinning_sequence(&stats, p)? {
        let m: Vec<String> = step.m_real.iter().map(|v| format!("{v:.3}")).collect();
        println!("  pivot {}: m = [{}]", step.pivot_index, m.join(", "));
    }

    let exact = brute_force_mip(&stats, p, 200)?;
    let ours = allocate_modified(&stats, p)?;
    println!(
        "exhaustive optimum {:?} (MSE {:.4e}); modified {:?} (MSE {:.4e})",
        exact.m, exact.predicted_mse, ours.m, ours.predicted_mse
    );
    Ok(())
}
