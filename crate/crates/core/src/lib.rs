//! Simulation of teleportation-based two-qubit entangling gates built from
//! linear optics.
//!
//! Two gates are modelled end to end:
//!
//! - a controlled-NOT teleported through a four-photon polarization cluster
//!   state, prepared with partially polarizing beam splitters and consumed by
//!   two partial (Φ±-only) Bell-state measurements, and
//! - a controlled-Phase teleported through a hyper-entangled resource whose
//!   spatial qubits are read out by single-photon spatial-polarization Bell
//!   measurements.
//!
//! The crate is layered. [`qubit`] holds exact state algebra on labelled
//! qubit registers. [`fock`] is a sparse multimode Fock-space engine for the
//! optical table. [`protocols`] builds the resource states and runs the
//! gates. [`noise`] adds the physical imperfections and the seeded shot
//! engine. [`metrics`] evaluates every figure of merit, and [`scenario`]
//! ties it together behind a declarative JSON format.

pub mod error;
pub mod fock;
pub mod metrics;
pub mod noise;
pub mod protocols;
pub mod qubit;
pub mod scenario;

pub use error::{Error, Result};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;

pub use qubit::{Basis, BellKind, DensityOp, Pauli, PauliString, Phase, PureState, QubitLabel};
