use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::fock::{FockState, ModeRegistry, OpticalElement, Polarization};
use crate::qubit::{BellKind, DensityOp, QubitLabel, QubitState};
use crate::{Error, Result, C64};

/// Outcome of one Bell-state measurement. `Fail` is the heralded
/// non-Φ result of the partial analyzer.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BsmOutcome {
    Bell(BellKind),
    Fail,
}

impl BsmOutcome {
    pub fn bell(self) -> Option<BellKind> {
        match self {
            BsmOutcome::Bell(k) => Some(k),
            BsmOutcome::Fail => None,
        }
    }
}

impl fmt::Display for BsmOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BsmOutcome::Bell(k) => f.write_str(k.symbol()),
            BsmOutcome::Fail => f.write_str("FAIL"),
        }
    }
}

impl FromStr for BsmOutcome {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("fail") {
            Ok(BsmOutcome::Fail)
        } else {
            s.parse().map(BsmOutcome::Bell)
        }
    }
}

impl Serialize for BsmOutcome {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BsmOutcome {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BsmMode {
    #[default]
    Complete,
    /// Only Φ± are resolved; Ψ± report `Fail`.
    PartialPhi,
}

/// One enumerated measurement branch.
#[derive(Clone, Debug, PartialEq)]
pub struct BsmBranch {
    pub outcome: BsmOutcome,
    pub probability: f64,
    /// Post-measurement state of the remaining qubits. `None` for `Fail`
    /// and for zero-probability outcomes.
    pub state: Option<QubitState>,
}

/// A Bell analyzer as a list of rank-one Kraus rows, one per resolved
/// outcome. Each row is a bra on the measured pair `(first, second)`,
/// already conjugated, so `Σ_s row[s]·ψ_s` is the branch amplitude. The
/// rest of the probability is `Fail`.
#[derive(Clone, Debug, PartialEq)]
pub struct BsmAnalyzer {
    rows: Vec<(BellKind, [C64; 4])>,
}

const LABEL_TOL: f64 = 1e-9;

impl BsmAnalyzer {
    /// Projectors onto the ideal Bell states.
    pub fn ideal(mode: BsmMode) -> Self {
        let rows = BellKind::ALL
            .into_iter()
            .filter(|k| mode == BsmMode::Complete || k.is_phi())
            .map(|k| (k, k.amplitudes().map(|a| a.conj())))
            .collect();
        BsmAnalyzer { rows }
    }

    /// Build an analyzer from detector-record rows. Each row is labelled
    /// with the Bell state it projects onto; rows with the same label must
    /// be proportional and are merged into one Kraus row.
    pub fn from_records(records: &[[C64; 4]]) -> Result<Self> {
        let mut rows: Vec<(BellKind, [C64; 4])> = Vec::new();
        for rec in records {
            let norm: f64 = rec.iter().map(|a| a.norm_sqr()).sum();
            if norm < LABEL_TOL {
                continue;
            }
            let kind = BellKind::ALL
                .into_iter()
                .find(|k| {
                    let ov: C64 = k.amplitudes().iter().zip(rec).map(|(b, r)| b * r).sum();
                    (ov.norm_sqr() / norm - 1.0).abs() < LABEL_TOL
                })
                .ok_or_else(|| Error::Protocol(format!("detector record {rec:?} is not a Bell projection")))?;
            // rows are stored on the Bell state's own phase; a record's
            // global phase is not observable
            let scale = norm.sqrt();
            match rows.iter_mut().find(|(k, _)| *k == kind) {
                Some((_, row)) => {
                    let old: f64 = row.iter().map(|a| a.norm_sqr()).sum();
                    let w = ((old + norm) / old).sqrt();
                    row.iter_mut().for_each(|a| *a *= w);
                }
                None => rows.push((kind, kind.amplitudes().map(|a| a.conj() * scale))),
            }
        }
        rows.sort_by_key(|(k, _)| *k);
        Ok(BsmAnalyzer { rows })
    }

    /// Partial two-photon analyzer derived from [`partial_bsm_elements`].
    pub fn two_photon_optical() -> Result<Self> {
        let reg = Arc::new(ModeRegistry::new(["a", "b"], 1)?);
        let inputs: Vec<Vec<u16>> = (0..4u8)
            .map(|s| {
                Ok(vec![
                    reg.mode_index("a", Polarization::from_bit(s >> 1), 0)?,
                    reg.mode_index("b", Polarization::from_bit(s & 1), 0)?,
                ])
            })
            .collect::<Result<_>>()?;
        let mut outputs = Vec::new();
        for pa in Polarization::BOTH {
            for pb in Polarization::BOTH {
                outputs.push(vec![reg.mode_index("a", pa, 0)?, reg.mode_index("b", pb, 0)?]);
            }
        }
        let records = detector_records(&reg, &inputs, &partial_bsm_elements("a", "b"), &outputs)?;
        Self::from_records(&records)
    }

    /// Complete single-photon analyzer on `(polarization, rail)` derived
    /// from [`sagnac_bsm_elements`].
    pub fn sagnac() -> Result<Self> {
        let reg = Arc::new(ModeRegistry::new(["r0", "r1"], 1)?);
        let rails = ["r0", "r1"];
        let inputs: Vec<Vec<u16>> = (0..4u8)
            .map(|s| {
                Ok(vec![reg.mode_index(
                    rails[(s & 1) as usize],
                    Polarization::from_bit(s >> 1),
                    0,
                )?])
            })
            .collect::<Result<_>>()?;
        let mut outputs = Vec::new();
        for rail in rails {
            for pol in Polarization::BOTH {
                outputs.push(vec![reg.mode_index(rail, pol, 0)?]);
            }
        }
        let records = detector_records(&reg, &inputs, &sagnac_bsm_elements("r0", "r1"), &outputs)?;
        Self::from_records(&records)
    }

    /// The same analyzer with Ψ± reported as `Fail`.
    pub fn phi_only(mut self) -> Self {
        self.rows.retain(|(k, _)| k.is_phi());
        self
    }

    pub fn outcomes(&self) -> impl Iterator<Item = BellKind> + '_ {
        self.rows.iter().map(|(k, _)| *k)
    }

    pub fn is_complete(&self) -> bool {
        self.rows.len() == 4
    }

    pub fn row(&self, kind: BellKind) -> Option<&[C64; 4]> {
        self.rows.iter().find(|(k, _)| *k == kind).map(|(_, r)| r)
    }

    /// Enumerate all outcomes on `(a, b)`. A `Fail` branch is included
    /// unless the analyzer is complete.
    pub fn measure(&self, state: &QubitState, a: &QubitLabel, b: &QubitLabel) -> Result<Vec<BsmBranch>> {
        let labels = [a.clone(), b.clone()];
        let mut branches = Vec::with_capacity(5);
        let mut total = 0.0;
        for (kind, row) in &self.rows {
            let (probability, state) = contract(state, &labels, row)?;
            total += probability;
            branches.push(BsmBranch {
                outcome: BsmOutcome::Bell(*kind),
                probability,
                state,
            });
        }
        if !self.is_complete() {
            branches.push(BsmBranch {
                outcome: BsmOutcome::Fail,
                probability: (1.0 - total).max(0.0),
                state: None,
            });
        }
        Ok(branches)
    }
}

/// Contract a bra on `labels`, returning the branch probability and the
/// renormalized remainder.
pub(crate) fn contract(state: &QubitState, labels: &[QubitLabel], row: &[C64]) -> Result<(f64, Option<QubitState>)> {
    match state {
        QubitState::Pure(s) => {
            let p = s.contract(labels, row)?;
            Ok((p.probability, p.residual.map(QubitState::Pure)))
        }
        QubitState::Mixed(rho) => {
            let (rest, m) = rho.contract(labels, row)?;
            let tr = m.trace().re;
            if tr <= 1e-300 {
                return Ok((0.0, None));
            }
            let (d, _) = DensityOp::normalized(rest, m)?;
            Ok((tr, Some(QubitState::Mixed(d))))
        }
    }
}

/// `records[p][s] = ⟨p|U|s⟩` for the given basis inputs and detector
/// records.
fn detector_records(
    reg: &Arc<ModeRegistry>,
    inputs: &[Vec<u16>],
    elements: &[OpticalElement],
    outputs: &[Vec<u16>],
) -> Result<Vec<[C64; 4]>> {
    let mut records = vec![[C64::new(0.0, 0.0); 4]; outputs.len()];
    for (s, input) in inputs.iter().enumerate() {
        let out = FockState::from_terms(reg.clone(), [(input.clone(), C64::new(1.0, 0.0))])?.apply_all(elements)?;
        for (p, rec) in outputs.iter().enumerate() {
            let mut key = rec.clone();
            key.sort_unstable();
            records[p][s] = out.amplitude(&key);
        }
    }
    Ok(records)
}

/// Two-photon partial analyzer on paths `a`, `b`: a PBS, a `Z` plate on
/// `b` to cancel the `i·i` of the doubly reflected term, then ±-basis
/// analysis on both outputs. Equal signs herald Φ⁺, opposite signs Φ⁻.
pub fn partial_bsm_elements(a: &str, b: &str) -> Vec<OpticalElement> {
    vec![
        OpticalElement::pbs(a, b),
        OpticalElement::hwp(b, 0.0),
        OpticalElement::hwp(a, 22.5),
        OpticalElement::hwp(b, 22.5),
    ]
}

/// Single-photon analyzer for a polarization qubit and a rail qubit on
/// `r0` (H′) and `r1` (V′). The rails are recombined on a PBS and both
/// outputs are analyzed in the ± basis. Readout:
/// `(r0, H) → Φ⁺`, `(r0, V) → Φ⁻`, `(r1, H) → Ψ⁺`, `(r1, V) → Ψ⁻`.
pub fn sagnac_bsm_elements(r0: &str, r1: &str) -> Vec<OpticalElement> {
    vec![
        OpticalElement::phase(r1, None, -FRAC_PI_2),
        OpticalElement::pbs(r0, r1),
        OpticalElement::hwp(r1, 0.0),
        OpticalElement::hwp(r0, 22.5),
        OpticalElement::hwp(r1, 22.5),
    ]
}

/// Detector `(rail, polarization)` that fires for each outcome of
/// [`sagnac_bsm_elements`].
pub fn sagnac_readout(kind: BellKind) -> (usize, Polarization) {
    match kind {
        BellKind::PhiPlus => (0, Polarization::H),
        BellKind::PhiMinus => (0, Polarization::V),
        BellKind::PsiPlus => (1, Polarization::H),
        BellKind::PsiMinus => (1, Polarization::V),
    }
}

/// Outcome heralded by a coincidence of the [`partial_bsm_elements`]
/// analyzer with polarizations `pa` on `a` and `pb` on `b`.
pub fn partial_readout(pa: Polarization, pb: Polarization) -> BellKind {
    if pa == pb {
        BellKind::PhiPlus
    } else {
        BellKind::PhiMinus
    }
}

/// Two-photon Bell measurement on polarization qubits `a` and `b`.
pub fn bsm_two_photon(state: &QubitState, a: &QubitLabel, b: &QubitLabel, mode: BsmMode) -> Result<Vec<BsmBranch>> {
    BsmAnalyzer::ideal(mode).measure(state, a, b)
}

/// Complete single-photon Bell measurement on a photon carrying the
/// polarization qubit `pol` and the rail qubit `rail`, through the optical
/// analyzer.
pub fn bsm_spatial_polarization(state: &QubitState, pol: &QubitLabel, rail: &QubitLabel) -> Result<Vec<BsmBranch>> {
    if pol == rail {
        return Err(Error::Encoding(format!(
            "photon `{pol}` needs distinct polarization and rail qubits"
        )));
    }
    BsmAnalyzer::sagnac()?.measure(state, pol, rail)
}
