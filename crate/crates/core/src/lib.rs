//! Correlated emission of two-level magnetic dipoles into a two-dimensional electron gas.
//!
//! CGS-Gaussian units throughout. Frequencies are angular (rad/s) unless a name says Hz.

pub mod error;
pub mod numerics;
pub mod units;

pub use error::{Error, Result};
pub use units::{derive, resonance_energy, Derived, DipoleEnsemble, PhysicalParams, Projection, Triad};
pub mod noise;
pub mod decay;
pub mod collective;
pub mod response;
pub mod io;
