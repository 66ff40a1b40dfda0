//! Classify the sign of `h^(n)` on the collar, locate its roots, and search a
//! doubling schedule for an admissible `m`.
//!
//!     cargo run --example sign_definiteness

use inflexion::polyext::{min_admissible_m, BoundaryJet, Collar, CollarPolynomial};

fn main() -> inflexion::Result<()> {
    // c (x - m - w)^n / n!  has a constant n-th derivative.
    let (m, w) = (4.0, 0.25);
    let definite = BoundaryJet::new(vec![-w * w * w / 6.0, w * w / 2.0, -w])?;
    // A value-only jet: h^(n) vanishes twice inside the collar.
    let unit = BoundaryJet::new(vec![1.0, 0.0, 0.0])?;
    let positive_n2 = BoundaryJet::new(vec![1.0, 1.0])?;

    for (name, jet) in [("constructed", &definite), ("unit value", &unit), ("n = 2, positive", &positive_n2)] {
        let h = CollarPolynomial::new(jet.clone(), Collar::increasing(m, w)?);
        println!("{name:>16}: {:?}, collar roots of h^(n) {:?}", h.sign_class(), h.nth_derivative_collar_roots());
    }

    // The roots for the unit jet sit at (1 ± 1/sqrt 3)/2 for every m.
    for m in [10.0, 1e3, 1e6] {
        let h = CollarPolynomial::new(unit.clone(), Collar::increasing(m, 1.0 / m)?);
        println!("unit jet, m = {m:e}: roots {:?}", h.nth_derivative_collar_roots());
    }

    println!("search for the unit jet: {:?}", min_admissible_m(&unit, 1)?);
    Ok(())
}
