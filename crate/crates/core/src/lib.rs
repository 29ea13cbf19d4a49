//! Numerical construction of entire curves into complex tori and into
//! `CP^1 x E` whose concentric holomorphic discs realize prescribed
//! Nevanlinna/Ahlfors currents, at finite stage depth, with certified
//! quantitative checks.
//!
//! The library is organized around the stage algorithms in [`builder`]:
//! each stage appends exponential bump terms to an explicit curve
//! expression ([`curves`]), searches the integer exponent `alpha` until the
//! length-area, pairing and proximity conditions hold with margin, and
//! emits a [`builder::StageReport`] backed by the adaptive quadrature in
//! [`quadrature`]. Supporting machinery lives in [`geometry`]
//! (lattices, constant forms, spectral decompositions), [`special`]
//! (Weierstrass p-function, bump functions, constructive Runge fits) and
//! [`analysis`] (normalized current reports, fiber tube masses).

pub mod analysis;
pub mod builder;
pub mod cli;
pub mod curves;
pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
