//! Independent checks on the spectral evolution.
//!
//! [`crank_nicolson`] evolves a lattice-sampled state in the time domain with
//! no reference to the eigenbasis. [`freespace`] gives the free-particle
//! near-field (Fresnel) and far-field (Fraunhofer) patterns of an ideal slit,
//! valid until the walls are felt.

pub mod crank_nicolson;
pub mod freespace;

pub use crank_nicolson::{crank_nicolson_evolve, CrankNicolson, LatticeState};
pub use freespace::{
    complex_erf, fraunhofer_envelope, free_space_window, fresnel_amplitude, fresnel_reference,
};
