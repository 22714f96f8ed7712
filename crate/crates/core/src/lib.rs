//! Density matrices from eigenvalues and chains of unitary rotations.
//!
//! A state on `ℂⁿ` (or `ℂⁿ ⊗ ℂᵐ`) is assembled as `ρ = Aⁿ⋯A² D A²†⋯Aⁿ†`,
//! where `D` carries the eigenvalues and each `A^j` mixes level `j` into
//! the levels below it. [`single`] covers scalar entries, [`block`] the
//! `m × m` block version, [`families`] the named bipartite families and
//! [`entanglement`] the partial-transpose test and structure detection.

pub mod block;
pub mod entanglement;
pub mod error;
pub mod families;
pub mod linalg;
pub mod sample;
pub mod single;
pub mod state;

pub use block::{assemble_rho_block, assemble_rho_block_with, BlockParams, Method};
pub use entanglement::{
    detect_structure, ppt_check, ppt_check_on, PptReport, Structure, Subsystem,
};
pub use error::{Error, Result};
pub use families::FamilySpec;
pub use linalg::{ComplexMatrix, Tolerances};
pub use single::{assemble_rho_single, SingleParams};
pub use state::DensityMatrix;
