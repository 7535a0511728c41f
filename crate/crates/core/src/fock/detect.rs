use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::mode::{ModeRegistry, Polarization};
use super::state::FockState;
use crate::{Error, Result};

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorModel {
    #[default]
    Threshold,
    NumberResolving,
}

/// A detector behind a path, optionally after a polarizer selecting `pol`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorPort {
    pub path: String,
    #[serde(default)]
    pub pol: Option<Polarization>,
}

impl DetectorPort {
    pub fn path(path: &str) -> Self {
        DetectorPort {
            path: path.into(),
            pol: None,
        }
    }

    pub fn analyzed(path: &str, pol: Polarization) -> Self {
        DetectorPort {
            path: path.into(),
            pol: Some(pol),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionPattern {
    pub ports: Vec<DetectorPort>,
    #[serde(default)]
    pub model: DetectorModel,
}

impl DetectionPattern {
    pub fn new(ports: Vec<DetectorPort>, model: DetectorModel) -> Self {
        DetectionPattern { ports, model }
    }

    /// One polarization-blind detector per path.
    pub fn paths<'a>(paths: impl IntoIterator<Item = &'a str>, model: DetectorModel) -> Self {
        DetectionPattern {
            ports: paths.into_iter().map(DetectorPort::path).collect(),
            model,
        }
    }

    /// Map each mode of `reg` to the port that sees it.
    pub(crate) fn port_of_mode(&self, reg: &ModeRegistry) -> Result<Vec<Option<usize>>> {
        let mut owner = vec![None; reg.len()];
        for (i, port) in self.ports.iter().enumerate() {
            let pols: &[Polarization] = match &port.pol {
                Some(Polarization::H) => &[Polarization::H],
                Some(Polarization::V) => &[Polarization::V],
                None => &Polarization::BOTH,
            };
            for &pol in pols {
                for k in 0..reg.internal_count() {
                    let m = reg.mode_index(&port.path, pol, k)? as usize;
                    if owner[m].replace(i).is_some() {
                        return Err(Error::InvalidParameter(format!(
                            "detector ports overlap on path `{}`",
                            port.path
                        )));
                    }
                }
            }
        }
        Ok(owner)
    }

    /// Photon count per port for one Fock key.
    pub(crate) fn counts(owner: &[Option<usize>], ports: usize, photons: &[u16]) -> Vec<u8> {
        let mut c = vec![0u8; ports];
        for &m in photons {
            if let Some(p) = owner[m as usize] {
                c[p] = c[p].saturating_add(1);
            }
        }
        c
    }
}

/// Result of conditioning on one photon per port.
#[derive(Clone, Debug)]
pub struct PostSelection {
    /// Renormalized surviving component, `None` when nothing survives.
    pub state: Option<FockState>,
    /// Squared norm of the terms with exactly one photon per port.
    pub probability: f64,
    /// Squared norm of the terms where every port sees at least one photon,
    /// i.e. the rate at which threshold detectors report the same pattern.
    pub threshold_probability: f64,
}

pub fn post_select(state: &FockState, pattern: &DetectionPattern) -> Result<PostSelection> {
    let owner = pattern.port_of_mode(state.registry())?;
    let n = pattern.ports.len();
    let mut threshold = 0.0;
    let kept = state.retain(|k| DetectionPattern::counts(&owner, n, k).iter().all(|&x| x == 1));
    for (k, a) in state.terms() {
        if DetectionPattern::counts(&owner, n, k).iter().all(|&x| x >= 1) {
            threshold += a.norm_sqr();
        }
    }
    let probability = kept.norm_sqr();
    let state = if kept.is_empty() {
        None
    } else {
        Some(kept.normalized()?.0)
    };
    Ok(PostSelection {
        state,
        probability,
        threshold_probability: threshold,
    })
}

/// Probability of every detector record. Threshold detectors report 0/1,
/// number-resolving ones report the count. Terms with distinct Fock keys are
/// orthogonal, so probabilities add without interference.
pub fn click_distribution(state: &FockState, pattern: &DetectionPattern) -> Result<BTreeMap<Vec<u8>, f64>> {
    let owner = pattern.port_of_mode(state.registry())?;
    let n = pattern.ports.len();
    let mut out: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
    for (k, a) in state.terms() {
        let mut c = DetectionPattern::counts(&owner, n, k);
        if pattern.model == DetectorModel::Threshold {
            for x in c.iter_mut() {
                *x = (*x).min(1);
            }
        }
        *out.entry(c).or_default() += a.norm_sqr();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::element::OpticalElement;
    use crate::fock::mode::ModeRegistry;
    use crate::C64;
    use std::sync::Arc;

    #[test]
    fn identity_network_keeps_everything() {
        let r = Arc::new(ModeRegistry::new(["a", "b"], 1).unwrap());
        let a = r.mode_index("a", Polarization::H, 0).unwrap();
        let b = r.mode_index("b", Polarization::V, 0).unwrap();
        let s = FockState::from_terms(r, [(vec![a, b], C64::new(1.0, 0.0))]).unwrap();
        let ps = post_select(&s, &DetectionPattern::paths(["a", "b"], DetectorModel::Threshold)).unwrap();
        assert!((ps.probability - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hong_ou_mandel_bunching() {
        let r = Arc::new(ModeRegistry::new(["a", "b"], 1).unwrap());
        let a = r.mode_index("a", Polarization::H, 0).unwrap();
        let b = r.mode_index("b", Polarization::H, 0).unwrap();
        let s = FockState::from_terms(r, [(vec![a, b], C64::new(1.0, 0.0))]).unwrap();
        let out = s.apply(&OpticalElement::beamsplitter("a", "b", 0.5)).unwrap();
        let ps = post_select(&out, &DetectionPattern::paths(["a", "b"], DetectorModel::Threshold)).unwrap();
        assert!(ps.probability < 1e-28);
        assert!(ps.state.is_none());
        let pnr = DetectionPattern::paths(["a", "b"], DetectorModel::NumberResolving);
        let dist = click_distribution(&out, &pnr).unwrap();
        assert!((dist[&vec![2, 0]] - 0.5).abs() < 1e-14);
        assert!((dist[&vec![0, 2]] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn overlapping_ports_rejected() {
        let r = Arc::new(ModeRegistry::new(["a"], 1).unwrap());
        let s = FockState::vacuum(r);
        let pat = DetectionPattern::new(
            vec![DetectorPort::path("a"), DetectorPort::analyzed("a", Polarization::H)],
            DetectorModel::Threshold,
        );
        assert!(post_select(&s, &pat).is_err());
        let bad = DetectionPattern::paths(["q"], DetectorModel::Threshold);
        assert!(matches!(post_select(&s, &bad), Err(Error::UnknownPath(_))));
    }
}
