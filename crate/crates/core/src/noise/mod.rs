//! Physical imperfections: double-pair emission, partial distinguishability,
//! imperfect PPBS transmissions and interferometric phase drift. The photon
//! model evaluates the full optical network in Fock space; the shot engine
//! samples it.

mod fit;
mod params;
mod photon;
mod qubit;
mod shots;

pub use fit::{fit_report, param_grid, FitReport, FitRow};
pub use params::{emission_configurations, sample_emission, Emission, NoiseParams, Overlaps, MAX_P2};
pub use photon::{
    analyzer, gate_records, preparation, ConfigHarmonics, Distribution, Harmonics, PhotonModel, Record, Setting,
};
pub use qubit::{product_input, QubitModel, ResourceSource};
pub use shots::{draw, run_shots, shot_rng, stream_key, tally, Shot, ShotResult};
