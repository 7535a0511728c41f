use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::bsm::{BsmAnalyzer, BsmMode, BsmOutcome};
use super::corrections::CorrectionTable;
use super::resource::{ResourceKind, ResourceState};
use crate::qubit::{DensityOp, Pauli, PauliString, PureState, QubitLabel, QubitState};
use crate::{Error, Result, C64};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateKind {
    /// Target on input `1`, control on input `2`.
    Cnot,
    Cphase,
}

impl GateKind {
    pub const ALL: [GateKind; 2] = [GateKind::Cnot, GateKind::Cphase];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Cnot => "cnot",
            GateKind::Cphase => "cphase",
        }
    }

    pub fn inputs(self) -> [QubitLabel; 2] {
        ["1".into(), "2".into()]
    }

    pub fn outputs(self) -> [QubitLabel; 2] {
        match self {
            GateKind::Cnot => ["4".into(), "6".into()],
            GateKind::Cphase => ["4'".into(), "6'".into()],
        }
    }

    /// The two measured pairs. For the C-Phase each pair is one photon:
    /// its polarization (the input) and its rail.
    pub fn bsm_pairs(self) -> [(QubitLabel, QubitLabel); 2] {
        [("1".into(), "3".into()), ("2".into(), "5".into())]
    }

    pub fn resource_kind(self) -> ResourceKind {
        match self {
            GateKind::Cnot => ResourceKind::ClusterChi,
            GateKind::Cphase => ResourceKind::HyperChi,
        }
    }

    pub fn default_bsm(self) -> BsmMode {
        match self {
            GateKind::Cnot => BsmMode::PartialPhi,
            GateKind::Cphase => BsmMode::Complete,
        }
    }

    /// The analyzer used by the gate. The two-photon complete mode has no
    /// linear-optics realization here and uses ideal projectors.
    pub fn analyzer(self, mode: BsmMode) -> Result<BsmAnalyzer> {
        match (self, mode) {
            (GateKind::Cnot, BsmMode::Complete) => Ok(BsmAnalyzer::ideal(BsmMode::Complete)),
            (GateKind::Cnot, BsmMode::PartialPhi) => BsmAnalyzer::two_photon_optical(),
            (GateKind::Cphase, BsmMode::Complete) => BsmAnalyzer::sagnac(),
            (GateKind::Cphase, BsmMode::PartialPhi) => Ok(BsmAnalyzer::sagnac()?.phi_only()),
        }
    }

    /// 4×4 unitary on `(input 1, input 2)`.
    pub fn unitary(self) -> DMatrix<C64> {
        let one = C64::new(1.0, 0.0);
        let mut u = DMatrix::zeros(4, 4);
        match self {
            GateKind::Cnot => {
                // index = 2·target + control; flip the target when control = V
                u[(0, 0)] = one;
                u[(3, 1)] = one;
                u[(2, 2)] = one;
                u[(1, 3)] = one;
            }
            GateKind::Cphase => {
                u[(0, 0)] = one;
                u[(1, 1)] = one;
                u[(2, 2)] = one;
                u[(3, 3)] = -one;
            }
        }
        u
    }

    /// Ideal output on the gate's output labels for an input on its input
    /// labels. Extra qubits in `input` are carried along.
    pub fn reference(self, input: &PureState) -> Result<PureState> {
        let out = input.apply_unitary(&self.inputs(), &self.unitary())?;
        let [i1, i2] = self.inputs();
        let [o1, o2] = self.outputs();
        out.relabel(&[(i1, o1), (i2, o2)])
    }

    /// Correction table derived by the Pauli-frame oracle (cached).
    pub fn corrections(self) -> &'static CorrectionTable {
        CorrectionTable::derived(self)
    }
}

/// CNOT on a two-qubit state ordered `(target, control)`.
pub fn cnot_reference(input: &PureState) -> Result<PureState> {
    two_qubit_reference(GateKind::Cnot, input)
}

/// Controlled-Z on a two-qubit state.
pub fn cphase_reference(input: &PureState) -> Result<PureState> {
    two_qubit_reference(GateKind::Cphase, input)
}

fn two_qubit_reference(gate: GateKind, input: &PureState) -> Result<PureState> {
    if input.num_qubits() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: input.num_qubits(),
        });
    }
    input.apply_unitary(input.register(), &gate.unitary())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOptions {
    /// Defaults to the gate's own analyzer.
    #[serde(default)]
    pub bsm: Option<BsmMode>,
    #[serde(default = "default_true")]
    pub corrections: bool,
    /// Coherence factor kept by each input qubit, `1` for none.
    #[serde(default = "default_one")]
    pub input_dephasing: f64,
}

fn default_true() -> bool {
    true
}

fn default_one() -> f64 {
    1.0
}

impl Default for GateOptions {
    fn default() -> Self {
        GateOptions {
            bsm: None,
            corrections: true,
            input_dephasing: 1.0,
        }
    }
}

/// One successful joint outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct GateBranch {
    pub outcomes: [BsmOutcome; 2],
    pub probability: f64,
    /// Correction that was applied, identity when corrections are off.
    pub correction: PauliString,
    /// Output register: the gate outputs followed by any extra input qubits.
    pub state: QubitState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateRunResult {
    pub gate: GateKind,
    pub branches: Vec<GateBranch>,
    /// Probability that both analyzers succeed.
    pub success_probability: f64,
    /// Success-conditioned mixture of the branch outputs.
    pub output: DensityOp,
}

impl GateRunResult {
    pub fn branch(&self, first: BsmOutcome, second: BsmOutcome) -> Option<&GateBranch> {
        self.branches.iter().find(|b| b.outcomes == [first, second])
    }
}

pub(crate) fn tensor(a: &QubitState, b: &QubitState) -> Result<QubitState> {
    match (a, b) {
        (QubitState::Pure(x), QubitState::Pure(y)) => Ok(QubitState::Pure(x.tensor(y)?)),
        _ => Ok(QubitState::Mixed(a.to_density().tensor(&b.to_density())?)),
    }
}

/// Z-dephasing that scales the coherences of `label` by `lambda`.
pub fn dephase(rho: &DensityOp, label: &QubitLabel, lambda: f64) -> Result<DensityOp> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "coherence factor {lambda} outside [0, 1]"
        )));
    }
    let flipped = rho.apply_pauli(&PauliString::single(label.clone(), Pauli::Z))?;
    DensityOp::mixture(&[(0.5 * (1.0 + lambda), rho.clone()), (0.5 * (1.0 - lambda), flipped)])
}

/// Teleport `input` through `resource` with two Bell measurements and the
/// outcome-dependent Pauli correction. All outcomes are enumerated.
pub fn run_gate(
    gate: GateKind,
    input: &QubitState,
    resource: &ResourceState,
    opts: &GateOptions,
) -> Result<GateRunResult> {
    if resource.kind != gate.resource_kind() {
        return Err(Error::Protocol(format!(
            "{} gate needs a {:?} resource, got {:?}",
            gate.name(),
            gate.resource_kind(),
            resource.kind
        )));
    }
    for l in gate.inputs() {
        if !input.register().contains(&l) {
            return Err(Error::UnknownLabel(l.to_string()));
        }
    }
    let mut input = input.clone();
    if opts.input_dephasing < 1.0 {
        let mut rho = input.to_density();
        for l in gate.inputs() {
            rho = dephase(&rho, &l, opts.input_dephasing)?;
        }
        input = QubitState::Mixed(rho);
    }
    let joint = tensor(&input, &resource.state)?;
    let analyzer = gate.analyzer(opts.bsm.unwrap_or(gate.default_bsm()))?;
    let table = gate.corrections();
    let [(a1, b1), (a2, b2)] = gate.bsm_pairs();
    let outputs = gate.outputs();
    let extras: Vec<QubitLabel> = input
        .register()
        .iter()
        .filter(|l| !gate.inputs().contains(l))
        .cloned()
        .collect();
    let order: Vec<QubitLabel> = outputs.iter().cloned().chain(extras).collect();

    let mut branches = Vec::new();
    for first in analyzer.measure(&joint, &a1, &b1)? {
        let Some(mid) = first.state else { continue };
        for second in analyzer.measure(&mid, &a2, &b2)? {
            let Some(out) = second.state else { continue };
            let outcomes = [first.outcome, second.outcome];
            let correction = if opts.corrections {
                table.get_outcomes(outcomes[0], outcomes[1])?.clone()
            } else {
                PauliString::identity()
            };
            let out = match out {
                QubitState::Pure(s) => QubitState::Pure(s.apply_pauli(&correction)?.reorder(&order)?),
                QubitState::Mixed(r) => QubitState::Mixed(r.apply_pauli(&correction)?.reorder(&order)?),
            };
            branches.push(GateBranch {
                outcomes,
                probability: first.probability * second.probability,
                correction,
                state: out,
            });
        }
    }
    let success_probability: f64 = branches.iter().map(|b| b.probability).sum();
    if success_probability <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    let parts: Vec<(f64, DensityOp)> = branches
        .iter()
        .map(|b| (b.probability / success_probability, b.state.to_density()))
        .collect();
    Ok(GateRunResult {
        gate,
        branches,
        success_probability,
        output: DensityOp::mixture(&parts)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{bell_state, BellKind, NamedQubit};

    fn input(a: NamedQubit, b: NamedQubit) -> QubitState {
        QubitState::Pure(PureState::product([("1", a), ("2", b)]).unwrap())
    }

    #[test]
    fn references() {
        let hv = PureState::product([("t", NamedQubit::H), ("c", NamedQubit::V)]).unwrap();
        let vv = PureState::product([("t", NamedQubit::V), ("c", NamedQubit::V)]).unwrap();
        assert!((cnot_reference(&hv).unwrap().fidelity(&vv).unwrap() - 1.0).abs() < 1e-15);
        let hp = PureState::product([("t", NamedQubit::H), ("c", NamedQubit::Plus)]).unwrap();
        let phi = bell_state(BellKind::PhiPlus, "t", "c").unwrap();
        assert!((cnot_reference(&hp).unwrap().fidelity(&phi).unwrap() - 1.0).abs() < 1e-15);
        let vp = PureState::product([("a", NamedQubit::V), ("b", NamedQubit::Plus)]).unwrap();
        let vm = PureState::product([("a", NamedQubit::V), ("b", NamedQubit::Minus)]).unwrap();
        assert!((cphase_reference(&vp).unwrap().fidelity(&vm).unwrap() - 1.0).abs() < 1e-15);
        let vv_out = cphase_reference(&vv).unwrap();
        assert!((vv_out.amplitudes()[3] + C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cnot_entangles_h_plus() {
        let r = run_gate(
            GateKind::Cnot,
            &input(NamedQubit::H, NamedQubit::Plus),
            &ResourceState::ideal(ResourceKind::ClusterChi),
            &GateOptions::default(),
        )
        .unwrap();
        assert!((r.success_probability - 0.25).abs() < 1e-12);
        let phi = bell_state(BellKind::PhiPlus, "4", "6").unwrap();
        assert!((r.output.fidelity(&phi).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cphase_uncorrected_average_is_quarter() {
        let r = run_gate(
            GateKind::Cphase,
            &input(NamedQubit::Plus, NamedQubit::Plus),
            &ResourceState::ideal(ResourceKind::HyperChi),
            &GateOptions {
                corrections: false,
                ..GateOptions::default()
            },
        )
        .unwrap();
        assert_eq!(r.branches.len(), 16);
        let target = GateKind::Cphase
            .reference(&PureState::product([("1", NamedQubit::Plus), ("2", NamedQubit::Plus)]).unwrap())
            .unwrap();
        let avg: f64 = r
            .branches
            .iter()
            .map(|b| b.state.fidelity(&target).unwrap())
            .sum::<f64>()
            / 16.0;
        assert!((avg - 0.25).abs() < 1e-12);
        for b in &r.branches {
            assert!((b.probability - 1.0 / 16.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatched_resource_is_rejected() {
        let e = run_gate(
            GateKind::Cnot,
            &input(NamedQubit::H, NamedQubit::H),
            &ResourceState::ideal(ResourceKind::HyperChi),
            &GateOptions::default(),
        );
        assert!(matches!(e, Err(Error::Protocol(_))));
    }

    #[test]
    fn dephasing_scales_coherence() {
        let rho = PureState::single("q", NamedQubit::Plus).to_density();
        let d = dephase(&rho, &"q".into(), 0.6).unwrap();
        assert!((d.matrix()[(0, 1)].re - 0.3).abs() < 1e-15);
    }
}
