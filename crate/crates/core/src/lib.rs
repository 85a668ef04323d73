//! Numerical kernels for experiments on Siegel disks, filled Julia sets and
//! near-parabolic renormalization of quadratic and cubic polynomials.

pub mod cfrac;
pub mod error;
pub mod fatou;
pub mod maps;
pub mod measure;
pub mod siegel;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
