//! Figures of merit from exact distributions or sampled counts: classical
//! conditional fidelities, correlation-based state fidelity, process
//! fidelity bounds, entanglement witnesses and the correction comparison.

mod bounds;
mod classical;
mod estimate;
mod process;

pub use bounds::{
    concurrence_lower_bound, correlation, entanglement_witness, parallelism_criterion,
    phi_plus_fidelity_from_correlations, process_fidelity_bounds, CriterionResult, ProcessBounds, WitnessKind,
};
pub use classical::{
    accepted_outcomes, classical_fidelity, complementary_fidelities, complementary_pair, derived_terms,
    parallelism_fidelity, parallelism_term_diff, truth_table_fidelity, ClassicalFidelity, ConditionalTable, Pair,
    TableEntry, Term, TermDiff, PRINTED_PARALLELISM_TERMS,
};
pub use estimate::Estimate;
pub use process::{
    choi_input, correction_comparison, entangling_input, process_fidelity, CorrectionComparison, CorrectionRow,
    ANCILLAS, OUTCOME_ORDER,
};
