//! Tolerances shared by every verification.

use serde::{Deserialize, Serialize};

/// Numerical thresholds used by the checks. One record, passed by value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative residual allowed when matching boundary jets.
    pub residual: f64,
    /// Relative tolerance for one-dimensional quadrature.
    pub quadrature: f64,
    /// Relative mismatch allowed across extension seams.
    pub seam: f64,
    /// Relative tolerance for Fourier quadrature refinement.
    pub fourier: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: 1e-8,
            quadrature: 1e-9,
            seam: 1e-7,
            fourier: 1e-9,
        }
    }
}
