use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fock::{
    post_select, to_qubits, DetectionPattern, DetectorModel, ModeRegistry, OpticalElement, QubitEncoding, Source,
    SourceConfig,
};
use crate::qubit::{BellKind, NamedQubit, PureState, QubitState};
use crate::{Error, Result, C64};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResourceKind {
    /// Four-photon polarization cluster on `(3, 4, 5, 6)`.
    ClusterChi,
    /// Hyper-entangled state on spatial qubits `3`, `5` and polarization
    /// qubits `4'`, `6'`.
    HyperChi,
    /// Four-photon polarization state on `(3, 4', 5, 6')` before the
    /// rail-splitting beam splitters.
    Lambda,
}

impl ResourceKind {
    pub fn target(self) -> PureState {
        match self {
            ResourceKind::ClusterChi => chi(),
            ResourceKind::HyperChi => chi_tilde(),
            ResourceKind::Lambda => lambda(),
        }
    }
}

/// A prepared resource: the realized state and the post-selection
/// probability of the pipeline that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct ResourceState {
    pub kind: ResourceKind,
    pub state: QubitState,
    pub probability: f64,
}

impl ResourceState {
    /// The analytic target, with unit preparation probability.
    pub fn ideal(kind: ResourceKind) -> Self {
        ResourceState {
            kind,
            state: QubitState::Pure(kind.target()),
            probability: 1.0,
        }
    }

    pub fn fidelity(&self) -> Result<f64> {
        self.state.fidelity(&self.kind.target())
    }
}

fn real_state(labels: [&str; 4], terms: &[(usize, f64)]) -> PureState {
    let mut amps = vec![C64::new(0.0, 0.0); 16];
    for &(idx, a) in terms {
        amps[idx] = C64::new(a, 0.0);
    }
    PureState::new(labels.iter().map(|&l| l.into()).collect(), amps).expect("normalized literal state")
}

/// `½[(HH+VV)₃₄HH₅₆ + (HV+VH)₃₄VV₅₆]`.
pub fn chi() -> PureState {
    // index bits: 3 4 5 6
    real_state(
        ["3", "4", "5", "6"],
        &[(0b0000, 0.5), (0b1100, 0.5), (0b0111, 0.5), (0b1011, 0.5)],
    )
}

/// `½[H₃H₄′(H₅H₆′ + V₅V₆′) + V₃V₄′(H₅H₆′ − V₅V₆′)]`.
pub fn lambda() -> PureState {
    real_state(
        ["3", "4'", "5", "6'"],
        &[(0b0000, 0.5), (0b0011, 0.5), (0b1100, 0.5), (0b1111, -0.5)],
    )
}

/// Same amplitudes as [`lambda`], with qubits 3 and 5 read as rails
/// (`H′ = 0`, `V′ = 1`).
pub fn chi_tilde() -> PureState {
    lambda()
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PpbsParams {
    pub t_h: f64,
    pub t_v: f64,
}

impl PpbsParams {
    pub const IDEAL: PpbsParams = PpbsParams {
        t_h: 1.0,
        t_v: 1.0 / 3.0,
    };
    pub const BALANCE: PpbsParams = PpbsParams {
        t_h: 1.0 / 3.0,
        t_v: 1.0,
    };
    pub const LOSSLESS: PpbsParams = PpbsParams { t_h: 1.0, t_v: 1.0 };

    /// Single effective splitter from per-port measured transmissions.
    pub fn averaged(ports: &[PpbsParams; 2]) -> PpbsParams {
        PpbsParams {
            t_h: 0.5 * (ports[0].t_h + ports[1].t_h),
            t_v: 0.5 * (ports[0].t_v + ports[1].t_v),
        }
    }
}

/// Parameters of the cluster-state pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterPrep {
    pub main: PpbsParams,
    pub balance: PpbsParams,
    /// Overlap between the two pairs at the PPBS.
    pub overlap: f64,
    pub wave_plates: bool,
}

impl Default for ClusterPrep {
    fn default() -> Self {
        ClusterPrep {
            main: PpbsParams::IDEAL,
            balance: PpbsParams::BALANCE,
            overlap: 1.0,
            wave_plates: true,
        }
    }
}

pub const CLUSTER_PATHS: [&str; 6] = ["3", "4", "5", "6", "4L", "6L"];

pub fn cluster_sources(overlap: f64) -> Result<SourceConfig> {
    let mut cfg = SourceConfig::new(vec![
        Source::bell(BellKind::PhiPlus, "3", "4"),
        Source::bell(BellKind::PhiPlus, "5", "6"),
    ]);
    if overlap < 1.0 {
        cfg.set_internal_overlap(0, 1, overlap)?;
    } else if overlap > 1.0 {
        return Err(Error::InvalidParameter(format!("overlap {overlap} outside [0, 1]")));
    }
    Ok(cfg)
}

/// PPBS on 4 and 6, a balancing PPBS′ on each output (losses go to `4L`,
/// `6L`), then the local wave plates on arms 3 and 4.
pub fn cluster_elements(prep: &ClusterPrep) -> Vec<OpticalElement> {
    let mut e = vec![
        OpticalElement::ppbs("4", "6", prep.main.t_h, prep.main.t_v),
        OpticalElement::ppbs("4", "4L", prep.balance.t_h, prep.balance.t_v),
        OpticalElement::ppbs("6", "6L", prep.balance.t_h, prep.balance.t_v),
    ];
    if prep.wave_plates {
        e.push(OpticalElement::hwp("3", 22.5));
        e.push(OpticalElement::hwp("4", 22.5));
    }
    e
}

pub fn prepare_cluster_chi(prep: &ClusterPrep) -> Result<ResourceState> {
    let cfg = cluster_sources(prep.overlap)?;
    let reg = Arc::new(ModeRegistry::new(CLUSTER_PATHS, cfg.internal_modes())?);
    let state = cfg.emit(&reg, &[1, 1])?.apply_all(&cluster_elements(prep))?;
    let ps = post_select(
        &state,
        &DetectionPattern::paths(["3", "4", "5", "6"], DetectorModel::NumberResolving),
    )?;
    let kept = ps.state.ok_or(Error::ZeroProbability)?;
    let enc: Vec<QubitEncoding> = ["3", "4", "5", "6"]
        .iter()
        .map(|p| QubitEncoding::polarization(p, p))
        .collect();
    Ok(ResourceState {
        kind: ResourceKind::ClusterChi,
        state: to_qubits(&kept, &enc)?,
        probability: ps.probability,
    })
}

pub const LAMBDA_PATHS: [&str; 4] = ["3", "4'", "5", "6'"];
pub const HYPER_PATHS: [&str; 6] = ["3", "4'", "5", "6'", "3V'", "5V'"];

/// `Φ⁺` on `(3, 6')` and `|+⟩₄′|+⟩₅` from the second, disentangled pair.
pub fn lambda_sources(overlap: f64) -> Result<SourceConfig> {
    let mut cfg = SourceConfig::new(vec![
        Source::bell(BellKind::PhiPlus, "3", "6'"),
        Source::product("4'", NamedQubit::Plus, "5", NamedQubit::Plus),
    ]);
    if overlap < 1.0 {
        cfg.set_internal_overlap(0, 1, overlap)?;
    } else if overlap > 1.0 {
        return Err(Error::InvalidParameter(format!("overlap {overlap} outside [0, 1]")));
    }
    Ok(cfg)
}

/// PBS overlaps of 4′ with 6′ and then 5 with 6′. The diagonal plate on 6′
/// between them and the two `Z` plates fix the form of the output.
pub fn lambda_elements() -> Vec<OpticalElement> {
    vec![
        OpticalElement::pbs("4'", "6'"),
        OpticalElement::hwp("6'", 22.5),
        OpticalElement::pbs("5", "6'"),
        OpticalElement::hwp("3", 0.0),
        OpticalElement::hwp("5", 0.0),
    ]
}

/// Rail-splitting PBS on photon `path` with its V′ rail `rail`. The
/// reflected rail gets a −π/2 phase to undo the reflection factor and a
/// 45° plate that resets its polarization to H.
pub fn rail_split_elements(path: &str, rail: &str) -> Vec<OpticalElement> {
    vec![
        OpticalElement::pbs(path, rail),
        OpticalElement::phase(rail, None, -FRAC_PI_2),
        OpticalElement::hwp(rail, 45.0),
    ]
}

pub fn prepare_lambda(overlap: f64) -> Result<ResourceState> {
    let (kept, p) = lambda_postselected(overlap, &LAMBDA_PATHS)?;
    let enc: Vec<QubitEncoding> = LAMBDA_PATHS.iter().map(|p| QubitEncoding::polarization(p, p)).collect();
    Ok(ResourceState {
        kind: ResourceKind::Lambda,
        state: to_qubits(&kept, &enc)?,
        probability: p,
    })
}

fn lambda_postselected(overlap: f64, paths: &[&str]) -> Result<(crate::fock::FockState, f64)> {
    let cfg = lambda_sources(overlap)?;
    let reg = Arc::new(ModeRegistry::new(paths.iter().copied(), cfg.internal_modes())?);
    let state = cfg.emit(&reg, &[1, 1])?.apply_all(&lambda_elements())?;
    let ps = post_select(
        &state,
        &DetectionPattern::paths(LAMBDA_PATHS, DetectorModel::NumberResolving),
    )?;
    Ok((ps.state.ok_or(Error::ZeroProbability)?, ps.probability))
}

/// λ followed by the rail-splitting beam splitters on photons 3 and 5.
pub fn prepare_hyper_chi(overlap: f64) -> Result<ResourceState> {
    let (kept, p) = lambda_postselected(overlap, &HYPER_PATHS)?;
    let mut elements = rail_split_elements("3", "3V'");
    elements.extend(rail_split_elements("5", "5V'"));
    let split = kept.apply_all(&elements)?;
    let enc = [
        QubitEncoding::spatial("3", "3", "3V'"),
        QubitEncoding::polarization("4'", "4'"),
        QubitEncoding::spatial("5", "5", "5V'"),
        QubitEncoding::polarization("6'", "6'"),
    ];
    Ok(ResourceState {
        kind: ResourceKind::HyperChi,
        state: to_qubits(&split, &enc)?,
        probability: p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_states_are_normalized_and_distinct() {
        assert!((chi().fidelity(&chi()).unwrap() - 1.0).abs() < 1e-15);
        assert!(
            lambda()
                .fidelity(
                    &chi()
                        .relabel(&[("4".into(), "4'".into()), ("6".into(), "6'".into()),])
                        .unwrap()
                )
                .unwrap()
                < 0.9
        );
    }

    #[test]
    fn ideal_pipelines_hit_targets() {
        let c = prepare_cluster_chi(&ClusterPrep::default()).unwrap();
        assert!((c.probability - 1.0 / 9.0).abs() < 1e-12);
        assert!((c.fidelity().unwrap() - 1.0).abs() < 1e-9);

        let l = prepare_lambda(1.0).unwrap();
        assert!((l.fidelity().unwrap() - 1.0).abs() < 1e-9);
        assert!((l.probability - 0.25).abs() < 1e-12);

        let h = prepare_hyper_chi(1.0).unwrap();
        assert!((h.fidelity().unwrap() - 1.0).abs() < 1e-9);
    }
}
