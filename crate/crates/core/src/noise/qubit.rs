use serde::{Deserialize, Serialize};

use super::params::NoiseParams;
use super::photon::{gate_records, Distribution, Record, Setting};
use crate::protocols::{
    dephase, prepare_cluster_chi, prepare_hyper_chi, run_gate, BsmMode, ClusterPrep, GateKind, GateOptions,
    GateRunResult, PpbsParams, ResourceKind, ResourceState,
};
use crate::qubit::{PureState, QubitState};
use crate::{Basis, Error, Result};

/// Where the qubit model's resource state comes from.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResourceSource {
    /// The analytic target, prepared with certainty.
    Ideal,
    /// Post-selected output of the optical preparation pipeline.
    #[default]
    Optical,
}

/// Gate simulation on qubit registers. Noise enters through the prepared
/// resource (PPBS transmissions, resource overlap) and through drift
/// dephasing; double pairs and BSM distinguishability need the photon model.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitModel {
    pub gate: GateKind,
    pub noise: NoiseParams,
    pub bsm: BsmMode,
    pub corrections: bool,
    pub resource: ResourceState,
}

impl QubitModel {
    pub fn new(
        gate: GateKind,
        noise: &NoiseParams,
        bsm: Option<BsmMode>,
        corrections: bool,
        source: ResourceSource,
    ) -> Result<Self> {
        noise.validate()?;
        if noise.p2 > 0.0 {
            return Err(Error::InvalidParameter(
                "double-pair emission needs the photon model".into(),
            ));
        }
        if gate == GateKind::Cnot && noise.overlap.bsm < 1.0 {
            return Err(Error::InvalidParameter(
                "input distinguishability needs the photon model".into(),
            ));
        }
        let resource_noise = noise.overlap.resource < 1.0 || noise.ppbs_ports.is_some();
        let mut resource = match (source, gate.resource_kind()) {
            (ResourceSource::Ideal, _) if resource_noise => {
                return Err(Error::InvalidParameter(
                    "resource noise given with an ideal resource".into(),
                ));
            }
            (ResourceSource::Ideal, kind) => ResourceState::ideal(kind),
            (ResourceSource::Optical, ResourceKind::ClusterChi) => prepare_cluster_chi(&ClusterPrep {
                main: noise.main_ppbs(),
                balance: PpbsParams::BALANCE,
                overlap: noise.overlap.resource,
                wave_plates: true,
            })?,
            (ResourceSource::Optical, _) => prepare_hyper_chi(noise.overlap.resource)?,
        };
        if gate == GateKind::Cphase && noise.sagnac_drift && noise.phase_drift > 0.0 {
            let mut rho = resource.state.to_density();
            for l in ["3", "5"] {
                rho = dephase(&rho, &l.into(), noise.drift_coherence())?;
            }
            resource.state = QubitState::Mixed(rho);
        }
        Ok(QubitModel {
            gate,
            noise: noise.clone(),
            bsm: bsm.unwrap_or(gate.default_bsm()),
            corrections,
            resource,
        })
    }

    /// Whether the photon model reduces exactly to this model for `noise`.
    pub fn is_exact_for(gate: GateKind, noise: &NoiseParams) -> bool {
        noise.p2 == 0.0
            && match gate {
                // a partially distinguishable resource photon also degrades
                // the second Bell measurement in the photon model
                GateKind::Cnot => noise.overlap.bsm == 1.0 && noise.overlap.resource == 1.0,
                GateKind::Cphase => true,
            }
    }

    pub fn options(&self) -> GateOptions {
        GateOptions {
            bsm: Some(self.bsm),
            corrections: self.corrections,
            input_dephasing: match self.gate {
                GateKind::Cnot => self.noise.drift_coherence(),
                GateKind::Cphase => 1.0,
            },
        }
    }

    /// Run on an input over the gate's input labels (extra labels are
    /// carried along).
    pub fn run(&self, input: &QubitState) -> Result<GateRunResult> {
        run_gate(self.gate, input, &self.resource, &self.options())
    }

    pub fn distribution(&self, setting: &Setting) -> Result<Distribution> {
        self.distribution_for(&product_input(self.gate, setting)?, setting.bases)
    }

    /// Record probabilities for an arbitrary (possibly entangled) input on
    /// the gate's input labels.
    pub fn distribution_for(&self, input: &PureState, bases: [Basis; 2]) -> Result<Distribution> {
        let run = self.run(&QubitState::Pure(input.clone()))?;
        let [o1, o2] = self.gate.outputs();
        let records = gate_records(self.bsm);
        let mut probs = vec![0.0; records.len()];
        for b in &run.branches {
            for bits in 0..4u8 {
                let bits = [bits >> 1, bits & 1];
                let proj = PureState::product([
                    (o1.clone(), bases[0].eigenstate(bits[0])),
                    (o2.clone(), bases[1].eigenstate(bits[1])),
                ])?;
                let rec = Record { bsm: b.outcomes, bits };
                let i = records
                    .iter()
                    .position(|r| *r == rec)
                    .ok_or_else(|| Error::Protocol(format!("unexpected record {rec:?}")))?;
                probs[i] += self.resource.probability * b.probability * b.state.fidelity(&proj)?;
            }
        }
        let acceptance = probs.iter().sum();
        Ok(Distribution {
            records: records.into_iter().zip(probs).collect(),
            acceptance,
            truncated: 0.0,
        })
    }
}

/// Two-qubit product input on the gate's input labels.
pub fn product_input(gate: GateKind, setting: &Setting) -> Result<PureState> {
    let [l1, l2] = gate.inputs();
    let [a, b] = setting.inputs;
    PureState::new(vec![l1, l2], vec![a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
}
