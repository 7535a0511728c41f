//! Resource preparation, Bell measurements, correction tables and the two
//! teleported gates.

mod bsm;
mod corrections;
mod gate;
mod resource;

pub use bsm::{
    bsm_spatial_polarization, bsm_two_photon, partial_bsm_elements, partial_readout, sagnac_bsm_elements,
    sagnac_readout, BsmAnalyzer, BsmBranch, BsmMode, BsmOutcome,
};
pub use corrections::{
    cnot_correction, cphase_correction, Cell, CellDiff, CorrectionEntry, CorrectionTable, PrintedEntry, PrintedTable,
    TableDiff, TableRelation,
};
pub use gate::{cnot_reference, cphase_reference, dephase, run_gate, GateBranch, GateKind, GateOptions, GateRunResult};
pub use resource::{
    chi, chi_tilde, cluster_elements, cluster_sources, lambda, lambda_elements, lambda_sources, prepare_cluster_chi,
    prepare_hyper_chi, prepare_lambda, rail_split_elements, ClusterPrep, PpbsParams, ResourceKind, ResourceState,
    CLUSTER_PATHS, HYPER_PATHS, LAMBDA_PATHS,
};
