//! Multimode Fock-space simulation of the optical table.
//!
//! Photons occupy `(path, polarization, internal)` modes. Elements act as
//! single-particle unitaries lifted to the many-photon space, detection
//! patterns post-select coincidences, and [`to_qubits`] reads the surviving
//! photons out as qubits.

mod detect;
mod element;
mod encode;
mod mode;
mod source;
mod state;

pub use detect::{click_distribution, post_select, DetectionPattern, DetectorModel, DetectorPort, PostSelection};
pub use element::OpticalElement;
pub use encode::{to_qubits, QubitEncoding};
pub use mode::{ModeId, ModeRegistry, Polarization, MAX_INTERNAL};
pub use source::{Source, SourceConfig, Wavepacket, DEFAULT_MAX_PHOTONS};
pub use state::{CreationPoly, FockState, Photons, PRUNE_EPS};
