//! Entanglement of two three-level atoms that cross a single-mode cavity one
//! after the other, coupled through a Stark-shifted two-photon transition.
//!
//! - [`effective`]: sector Hamiltonian, closed-form eigen-system, passage
//!   amplitudes.
//! - [`two_atom`]: reduced two-atom state for Fock and thermal fields.
//! - [`entanglement`]: concurrence and entanglement of formation, closed form
//!   and generic.
//! - [`micro`]: exact three-level ladder model used as an oracle.
//! - [`sweep`], [`validate`], [`config`]: the machinery behind the CLI.

// Negated comparisons also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod effective;
pub mod entanglement;
pub mod error;
pub mod micro;
pub mod sweep;
pub mod two_atom;
pub mod validate;

pub use effective::{
    eigensystem, passage_amplitudes, sector_matrix, sector_passage, EigenSystem, ModelParams,
    PassageAmplitudes, SectorMatrix,
};
pub use entanglement::{
    binary_entropy, concurrence, concurrence_generic, entanglement, eof, product_spectrum,
    spin_flip, xstate_spectrum, EntanglementResult, TracePolicy,
};
pub use error::{Error, Result};
pub use two_atom::{
    joint_density_fock, joint_density_thermal, nbar_from_ratio, thermal_weights, ThermalField,
    TwoAtomDensityMatrix,
};
