//! Compactly supported high-order extensions of smooth functions on boxes,
//! together with numerical checks of their Fourier decay and inversion.

pub mod cli;
pub mod config;
pub mod conjecture;
pub mod error;
pub mod exact;
pub mod extender;
pub mod fit;
pub mod models;
pub mod polyext;
pub mod quadrature;
pub mod report;
pub mod spectral;

pub use config::Tolerances;
pub use error::{Error, Result};
