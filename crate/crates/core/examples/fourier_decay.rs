//! Fourier decay of extensions: a power-law fit along a ray in 1D, and the
//! `D m^dim / |k|^n` bound across a 2D schedule.
//!
//!     cargo run --release --example fourier_decay

use inflexion::extender::{build_extension, ExtensionSpec};
use inflexion::models::FunctionModel;
use inflexion::spectral::{decay_bound_check, decay_exponent_fit, WaveVector};

fn main() -> inflexion::Result<()> {
    let g1 = FunctionModel::gaussian(1, 1.0)?;
    let e1 = build_extension(ExtensionSpec::new(g1, 2.0, 3, 1)?)?;
    let fit = decay_exponent_fit(&e1, &WaveVector::new(vec![1.0])?, (5.0, 50.0), 200, 1e-10)?;
    println!("1D, n = 3: |F(k)| ~ {:.3e} |k|^{:.2} (log residual {:.2})", fit.constant, fit.exponent, fit.residual);

    let g2 = FunctionModel::gaussian(2, 1.0)?;
    let exts = [4.0, 8.0, 16.0]
        .iter()
        .map(|&m| build_extension(ExtensionSpec::new(g2.clone(), m, 3, 2)?))
        .collect::<inflexion::Result<Vec<_>>>()?;
    let ks: Vec<WaveVector> = (0..12)
        .map(|i| {
            let r = 5.0 * 10f64.powf(i as f64 / 11.0);
            let t = 0.3 + 0.09 * i as f64;
            WaveVector::new(vec![r * t.cos(), r * t.sin()])
        })
        .collect::<inflexion::Result<_>>()?;
    let report = decay_bound_check(&exts, 3, &ks, 1e-9)?;
    println!("2D bound, fitted D = {}", report.details["fitted_d"]);
    for c in &report.checks {
        println!("  {:<28} {:.4e} <= {:.4e}  {}", c.name, c.measured, c.bound, if c.pass { "ok" } else { "FAIL" });
    }
    Ok(())
}
