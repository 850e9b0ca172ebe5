//! Gaussian continuous-variable toolkit.
//!
//! The crate covers covariance-matrix algebra for Gaussian states, bipartite
//! entanglement measures, Gaussian quantum Fisher information with optimal
//! observables, quantum illumination with absorption loss, bi-frequency
//! illumination, microwave teleportation fidelities (photon subtraction,
//! entanglement swapping, finite-gain homodyning), and open-air and
//! satellite channel models. A truncated Fock-space engine in [`fock`]
//! serves as an independent brute-force oracle for the closed forms.
//!
//! Start with [`gaussian`] for states and transforms; the `examples/`
//! directory has one runnable program per capability.

pub mod bifreq;
pub mod channel;
pub mod cli;
pub mod distill;
pub mod entanglement;
pub mod error;
pub mod estimation;
pub mod fock;
pub mod gaussian;
pub mod illumination;
pub mod numeric;
pub mod presets;
pub mod teleport;

pub use error::{Error, Result};
pub use gaussian::{GaussianState, ModeSubset, SymplecticTransform};
