//! Random-jet scan of whether `h^(n)` becomes sign-definite as `m` grows,
//! plus the scaled-root table for one jet.
//!
//!     cargo run --release --example conjecture_scan

use inflexion::conjecture::{conjecture_scan, random_jet, scaled_root_table, ScanConfig};

fn main() -> inflexion::Result<()> {
    let m_schedule: Vec<f64> = (2..=10).map(|e| 2f64.powi(e)).collect();
    let cfg = ScanConfig { n_min: 3, n_max: 5, trials: 20, m_schedule: m_schedule.clone(), exponent: 1, seed: 7 };
    let report = conjecture_scan(&cfg)?;
    for s in &report.summaries {
        println!(
            "n = {}: {:.0}% definite at the largest m, {:.0}% with converging roots",
            s.n,
            100.0 * s.fraction_definite,
            100.0 * s.fraction_converging
        );
    }
    println!("counterexamples to monotonicity: {}", report.counterexamples.len());

    let jet = random_jet(3, 11)?;
    let table = scaled_root_table(&jet, &m_schedule, 1)?;
    for row in table.rows.iter().step_by(3) {
        println!("  m = {:>5}: {:?}, collar roots {:?}", row.m, row.class, row.collar_roots);
    }
    println!("extrapolated roots t: {:?}", table.extrapolates());
    Ok(())
}
