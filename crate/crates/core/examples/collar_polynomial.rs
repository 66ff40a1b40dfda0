//! Build the Hermite collar polynomial for a boundary jet and inspect it.
//!
//!     cargo run --example collar_polynomial

use inflexion::polyext::{BoundaryJet, Collar, CollarPolynomial};

fn main() -> inflexion::Result<()> {
    let jet = BoundaryJet::new(vec![0.8, -1.2, 0.5, 2.0])?;
    let m = 6.0;
    let w = 1.0 / m;
    let h = CollarPolynomial::new(jet.clone(), Collar::increasing(m, w)?);

    println!("collar [{m}, {}], order n = {}", h.collar().outer(), h.order());
    println!("coefficients in s = (x - m)/w: {:?}", h.coeffs());
    for d in 0..h.order() {
        let inner = h.eval(m, d)?;
        let outer = h.eval(m + w, d)?;
        println!("  h^({d}): at m = {inner:+.6} (jet {:+.6}), at m + w = {outer:+.3e}", jet.values()[d]);
    }
    println!("boundary residual   {:.3e}", h.boundary_residual());
    println!("sup |h| on collar   {:.6}", h.sup_norm());
    println!("||h^(n)||_1         {:.6}", h.nth_derivative_l1());
    Ok(())
}
