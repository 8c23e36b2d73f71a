//! Simulation of a two-level quantum dot coupled to the clockwise and
//! counterclockwise whispering-gallery modes of a microdisk cavity.
//!
//! The crate covers four layers:
//!
//! * [`hilbert`]: truncated two-mode-plus-qubit operator algebra,
//! * [`model`]: system parameters, Hamiltonian and Liouvillian assembly,
//! * [`steady`] and [`dynamics`]: steady states, waveguide transmission and
//!   reflection, time evolution and two-time correlations,
//! * [`classical`] and [`analysis`]: coupled-mode theory, bistability state
//!   equations, and non-classicality diagnostics.
//!
//! All rates are stored in angular units (rad/ns). Use [`units`] to convert
//! from the "GHz" (rate / 2π) convention.

pub mod analysis;
pub mod classical;
pub mod dynamics;
mod error;
pub mod hilbert;
pub mod model;
pub mod ode;
pub mod sparse;
pub mod steady;
pub mod units;

pub use error::{Error, Result};
pub use hilbert::{DensityMatrix, HilbertSpace, Mode, Operator};
pub use model::{Liouvillian, SystemParams};
pub use steady::SpectrumRecord;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
