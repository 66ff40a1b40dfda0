//! Extend a 2D Gaussian off `[-m, m]^2`, then check seams and the L1 budget
//! of the n-th derivatives across a schedule.
//!
//!     cargo run --release --example extend_gaussian_2d

use inflexion::extender::{build_extension, collar_bounds_report, norm_budget, norm_budget_report, seam_report, ExtensionSpec};
use inflexion::models::FunctionModel;

fn main() -> inflexion::Result<()> {
    let model = FunctionModel::parse("gaussian", 2)?;
    let exts = [4.0, 8.0, 16.0]
        .iter()
        .map(|&m| build_extension(ExtensionSpec::new(model.clone(), m, 3, 2)?))
        .collect::<inflexion::Result<Vec<_>>>()?;

    let e = &exts[0];
    println!("m = {}, w = {}, support [-{o}, {o}]^2", e.m(), e.width(), o = e.outer());
    for p in [[0.5, -1.0], [4.0 + e.width() / 2.0, 1.0], [4.05, -4.05], [5.0, 0.0]] {
        println!("  f_m{p:?} = {:+.6e}  ({:?})", e.eval(&p, &[0, 0])?, e.region(&p));
    }

    let seams = seam_report(e, 12, 1e-7)?;
    println!("seams continuous: {}", seams.pass());
    for ext in &exts {
        println!("  m = {:>4}: ||∂^3 f_m||_1 per axis {:?}", ext.m(), norm_budget(ext).per_axis);
    }
    println!("budget grows no faster than m^2: {}", norm_budget_report(&exts, 1e-3)?.pass());
    println!("collar bounds hold: {}", collar_bounds_report(&exts, 1e-3)?.pass());
    Ok(())
}
