use serde::{Deserialize, Serialize};

use crate::protocols::{BsmOutcome, GateKind, GateRunResult};
use crate::qubit::{bell_state, NamedQubit, PureState, QubitState};
use crate::{BellKind, DensityOp, Result};

/// Ancilla labels paired with the gate inputs in the Choi construction.
pub const ANCILLAS: [&str; 2] = ["a1", "a2"];

/// `Φ⁺` between each gate input and its ancilla, ordered
/// `(in₁, in₂, a₁, a₂)`.
pub fn choi_input(gate: GateKind) -> Result<PureState> {
    let [i1, i2] = gate.inputs();
    let s = bell_state(BellKind::PhiPlus, i1.clone(), ANCILLAS[0])?.tensor(&bell_state(
        BellKind::PhiPlus,
        i2.clone(),
        ANCILLAS[1],
    )?)?;
    s.reorder(&[i1, i2, ANCILLAS[0].into(), ANCILLAS[1].into()])
}

/// Entanglement fidelity `⟨χ_U|ρ_Choi|χ_U⟩` of a channel with the gate
/// unitary, where `run` applies the channel to states on the gate inputs
/// plus ancillas and returns the normalized output.
pub fn process_fidelity<F>(gate: GateKind, run: F) -> Result<f64>
where
    F: FnOnce(&QubitState) -> Result<DensityOp>,
{
    let input = choi_input(gate)?;
    let target = gate.reference(&input)?;
    run(&QubitState::Pure(input))?.fidelity(&target)
}

/// Input whose ideal output is maximally entangled: `|H,+⟩` for the C-NOT
/// (target, control), `|+,+⟩` for the C-Phase.
pub fn entangling_input(gate: GateKind) -> Result<PureState> {
    let [i1, i2] = gate.inputs();
    let first = match gate {
        GateKind::Cnot => NamedQubit::H,
        GateKind::Cphase => NamedQubit::Plus,
    };
    PureState::product([(i1, first), (i2, NamedQubit::Plus)])
}

/// Per-outcome fidelities of a run with and without corrections.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectionRow {
    pub outcomes: [String; 2],
    pub probability: f64,
    pub corrected: f64,
    pub uncorrected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectionComparison {
    pub rows: Vec<CorrectionRow>,
    /// Plain means over the listed outcomes.
    pub corrected_average: f64,
    pub uncorrected_average: f64,
}

use BellKind::{PhiMinus as Fm, PhiPlus as Fp, PsiMinus as Sm, PsiPlus as Sp};

/// Display order of the sixteen joint outcomes `(first BSM, second BSM)`.
pub const OUTCOME_ORDER: [(BellKind, BellKind); 16] = [
    (Fp, Fp),
    (Sp, Fp),
    (Fp, Sp),
    (Sp, Sp),
    (Fp, Fm),
    (Sp, Fm),
    (Fp, Sm),
    (Sp, Sm),
    (Fm, Fp),
    (Sm, Fp),
    (Fm, Sp),
    (Sm, Sp),
    (Fm, Fm),
    (Sm, Fm),
    (Fm, Sm),
    (Sm, Sm),
];

/// Fidelity of every branch with `target`, paired across the two runs, in
/// [`OUTCOME_ORDER`]. Outcomes absent from either run are skipped.
pub fn correction_comparison(
    corrected: &GateRunResult,
    uncorrected: &GateRunResult,
    target: &PureState,
) -> Result<CorrectionComparison> {
    let mut rows = Vec::new();
    for (a, b) in OUTCOME_ORDER {
        let key = [BsmOutcome::Bell(a), BsmOutcome::Bell(b)];
        let (Some(c), Some(u)) = (corrected.branch(key[0], key[1]), uncorrected.branch(key[0], key[1])) else {
            continue;
        };
        rows.push(CorrectionRow {
            outcomes: [a.symbol().to_string(), b.symbol().to_string()],
            probability: c.probability,
            corrected: c.state.fidelity(target)?,
            uncorrected: u.state.fidelity(target)?,
        });
    }
    let n = rows.len().max(1) as f64;
    Ok(CorrectionComparison {
        corrected_average: rows.iter().map(|r| r.corrected).sum::<f64>() / n,
        uncorrected_average: rows.iter().map(|r| r.uncorrected).sum::<f64>() / n,
        rows,
    })
}
