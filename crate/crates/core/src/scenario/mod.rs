//! Declarative scenarios: parsing, execution, sweeps and the verification
//! suite behind the command-line front end.

mod config;
mod path;
mod run;
mod sweep;
mod verify;

pub use config::{
    Analysis, Correlations, GateChoice, InputSetting, InputState, Mode, ModelChoice, QubitInput, Replay, ResourceName,
    ResourceOptions, Scenario, WavePlates, SCENARIO_SCHEMA,
};
pub use path::set_path;
pub use run::{
    entangling_pair, exit_code, run, stabilizer_terms, BoundsReport, EntanglingReport, MetricsReport, ModelKind,
    OracleReport, OutcomeRow, ProcessReport, ResourceReport, RunReport, RunStatus, SettingReport, REPORT_SCHEMA,
};
pub use sweep::{column, sweep, write_csv, SweepPoint, FIDELITY_COLUMNS, SWEEP_COLUMNS};
pub use verify::{
    check_bound_soundness, check_cluster, check_correction_comparison, check_correction_table, check_hyper_resources,
    check_metric_arithmetic, check_monotonicity, check_parallelism_terms, check_partial_bsm, check_printed_table,
    check_reproducibility, check_zero_noise, increasing_columns, monotonicity_sweeps, ppbs_vvvv_ratio, random_noise,
    verify, Check, VerifyOptions, VerifySummary,
};
