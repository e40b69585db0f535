//! Resonances, Gamow-Siegert functions and Darboux deformations of the
//! one-dimensional square well and square barrier.
//!
//! Units are ħ²/2m = 1 throughout, so an energy is the square of a
//! wavenumber: ε = k².

pub mod cli;
pub mod darboux;
pub mod error;
pub mod gamow;
pub mod numerics;
pub mod potentials;
pub mod resonances;
pub mod scattering;

pub use error::{Error, Result};
pub use gamow::{GamowFunction, Variant};
pub use potentials::{PotentialKind, PotentialSpec};
pub use resonances::{BoundState, Resonance, ScanResult};
