//! The angular factor `Σ|u_i|^p` over the unit sphere and its minimum, and
//! the L1 tail of a power law outside a ball.
//!
//!     cargo run --example alpha_min

use inflexion::spectral::{alpha, alpha_min, l1_tail, PowerLaw};

fn main() -> inflexion::Result<()> {
    for p in [2u32, 4, 6, 10, 14] {
        let min = alpha_min(p)?;
        // The diagonal direction gives 3^(1 - p/2).
        let diag = alpha(p, (1.0f64 / 3.0).sqrt().acos(), std::f64::consts::FRAC_PI_4);
        println!("p = {p:>2}: min {min:.6e}, diagonal {diag:.6e}");
    }
    for exponent in [-2.0, -4.0, -6.0] {
        let tail = l1_tail(&PowerLaw { constant: 1.0, exponent }, 10.0, 3)?;
        println!("∫_{{|k|>10}} |k|^{exponent} dk in 3D: {tail:?}");
    }
    Ok(())
}
