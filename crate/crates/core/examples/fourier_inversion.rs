//! Reconstruct a Gaussian from the transforms of its extensions and watch
//! the pointwise error fall as `m` grows.
//!
//!     cargo run --release --example fourier_inversion

use inflexion::models::FunctionModel;
use inflexion::spectral::inversion_error;

fn main() -> inflexion::Result<()> {
    let g = FunctionModel::gaussian(1, 1.0)?;
    let points: Vec<Vec<f64>> = (0..10).map(|i| vec![-2.0 + 4.0 * i as f64 / 9.0]).collect();
    let report = inversion_error(&g, &[2.0, 4.0, 8.0], 3, 1, &points, 40.0, Some(1e-5))?;
    println!("schedule {}", report.details["m_schedule"]);
    println!("max errors {}", report.details["max_errors"]);
    println!("pass: {}", report.pass());
    Ok(())
}
