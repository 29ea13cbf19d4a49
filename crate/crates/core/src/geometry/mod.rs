//! Lattices and tori, constant (1,1)-forms with the affine-current pairing,
//! target currents with their spectral decomposition, and the metrics on
//! `CP^1` and `E` used by the separation and tube logic.

mod forms;
mod lattice;
mod metrics;
mod spectral;

pub use forms::{affine_current_pairing, CMatrix, ConstantForm};
pub use lattice::{reduce_mod_lattice, Lattice, ReduceMode};
pub use metrics::{e_distance, fs_distance, Cp1Point};
pub use spectral::{spectral_decompose, SpectralDecomposition, TargetCurrent};
