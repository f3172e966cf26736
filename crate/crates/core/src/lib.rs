//! Spectral simulation of slit-collapsed states in an infinite square well.
//!
//! A particle whose position is measured by a slit at `t_M` collapses to a
//! rectangular wave function of width `a` centred at `y0`. Expanding that
//! state in the well's eigenbasis and evolving each mode unitarily gives the
//! density `|Psi(y, t)|^2`, whose space-time plot is a quantum carpet with
//! full, mirror and fractional revivals. This crate computes the expansion,
//! evaluates slices and carpets on dense grids, maps screen distance to
//! time of flight, and checks the results against independent oracles
//! (quadrature coefficients, a Crank-Nicolson evolver and free-space
//! Fresnel/Fraunhofer references).

pub mod analysis;
pub mod error;
pub mod io;
pub mod numeric;
pub mod oracle;
pub mod phase;
pub mod propagator;
pub mod screen;
pub mod spectral;

pub use error::{Error, Result};
pub use phase::{reduced_phase, Tau};
pub use propagator::{
    amplitude_at, carpet, carpet_with_workers, density_slice, density_slice_at, DensityField,
    SpaceTimeGrid, WaveSlice,
};
pub use screen::BeamConfig;
pub use spectral::{
    coefficients_by_quadrature, eigenenergy, eigenfunction, parseval_deficit, slit_coefficients,
    CollapseProfile, GeneralProfile, ModalCoefficients, SlitAperture, WellConfig,
};

pub use num_complex::Complex64;
