//! Special functions: Weierstrass `p` with certified truncation, the
//! Fubini-Study pullback density, exponential bump functions with their
//! rotated copies, and constructive Runge approximation by least-squares
//! polynomial fits with a-posteriori grid verification.

mod bump;
mod poly;
mod runge;
mod weierstrass;

pub use bump::{bump_extrema, BumpExtrema, BumpFunction};
pub use poly::Polynomial;
pub use runge::{multi_disc_runge, runge_correction, DiscTarget, FitOptions, RungeReport};
pub use weierstrass::{DensityTable, WeierstrassP};
