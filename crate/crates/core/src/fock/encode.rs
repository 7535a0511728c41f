use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::mode::Polarization;
use super::state::FockState;
use crate::qubit::{DensityOp, PureState, QubitLabel, QubitState};
use crate::{Error, Result, C64};

/// How one photon carries qubits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QubitEncoding {
    /// `|H⟩ = 0`, `|V⟩ = 1` on a single path.
    Polarization { label: QubitLabel, path: String },
    /// Which of two rails the photon occupies; polarization is traced out.
    Spatial {
        label: QubitLabel,
        rail0: String,
        rail1: String,
    },
    /// Polarization and rail of the same photon as two qubits.
    Dual {
        polarization: QubitLabel,
        spatial: QubitLabel,
        rail0: String,
        rail1: String,
    },
}

impl QubitEncoding {
    pub fn polarization(label: &str, path: &str) -> Self {
        QubitEncoding::Polarization {
            label: label.into(),
            path: path.into(),
        }
    }

    pub fn spatial(label: &str, rail0: &str, rail1: &str) -> Self {
        QubitEncoding::Spatial {
            label: label.into(),
            rail0: rail0.into(),
            rail1: rail1.into(),
        }
    }

    pub fn dual(polarization: &str, spatial: &str, rail0: &str, rail1: &str) -> Self {
        QubitEncoding::Dual {
            polarization: polarization.into(),
            spatial: spatial.into(),
            rail0: rail0.into(),
            rail1: rail1.into(),
        }
    }

    fn labels(&self) -> Vec<QubitLabel> {
        match self {
            QubitEncoding::Polarization { label, .. } | QubitEncoding::Spatial { label, .. } => vec![label.clone()],
            QubitEncoding::Dual {
                polarization, spatial, ..
            } => vec![polarization.clone(), spatial.clone()],
        }
    }

    fn rails(&self) -> Vec<&str> {
        match self {
            QubitEncoding::Polarization { path, .. } => vec![path],
            QubitEncoding::Spatial { rail0, rail1, .. } | QubitEncoding::Dual { rail0, rail1, .. } => {
                vec![rail0, rail1]
            }
        }
    }

    /// Qubit bits carried by a photon in (rail, pol), plus the part of the
    /// mode that is not encoded and therefore traced.
    fn read(&self, rail: usize, pol: Polarization) -> (Vec<u8>, u8) {
        match self {
            QubitEncoding::Polarization { .. } => (vec![pol.bit()], 0),
            QubitEncoding::Spatial { .. } => (vec![rail as u8], pol.bit()),
            QubitEncoding::Dual { .. } => (vec![pol.bit(), rail as u8], 0),
        }
    }
}

/// Convert single-photon-per-slot Fock terms into qubits.
///
/// Internal indices, unencoded degrees of freedom and any photons outside
/// the declared slots are traced out. The result is pure when all terms
/// share the same traced configuration and mixed otherwise. It is always
/// normalized.
pub fn to_qubits(state: &FockState, encodings: &[QubitEncoding]) -> Result<QubitState> {
    let reg = state.registry();
    let register: Vec<QubitLabel> = encodings.iter().flat_map(|e| e.labels()).collect();
    crate::qubit::check_unique(&register)?;
    let nq = register.len();

    // mode -> (slot, rail)
    let mut owner: Vec<Option<(usize, usize)>> = vec![None; reg.len()];
    for (slot, enc) in encodings.iter().enumerate() {
        for (rail, path) in enc.rails().into_iter().enumerate() {
            for pol in Polarization::BOTH {
                for k in 0..reg.internal_count() {
                    let m = reg.mode_index(path, pol, k)? as usize;
                    if owner[m].replace((slot, rail)).is_some() {
                        return Err(Error::InvalidParameter(format!(
                            "path `{path}` used by two qubit slots"
                        )));
                    }
                }
            }
        }
    }

    let mut groups: BTreeMap<Vec<u32>, Vec<C64>> = BTreeMap::new();
    for (key, amp) in state.terms() {
        let mut bits: Vec<Option<Vec<u8>>> = vec![None; encodings.len()];
        let mut env_slots = vec![0u32; encodings.len()];
        let mut outside: Vec<u32> = Vec::new();
        for &m in key.iter() {
            match owner[m as usize] {
                Some((slot, rail)) => {
                    if bits[slot].is_some() {
                        return Err(Error::Encoding(format!(
                            "term |{}⟩ has two photons in one qubit slot",
                            state.describe(key)
                        )));
                    }
                    let (_, pol, internal) = reg.decompose(m);
                    let (b, extra) = encodings[slot].read(rail, pol);
                    bits[slot] = Some(b);
                    env_slots[slot] = (extra as u32) << 8 | internal as u32;
                }
                None => outside.push(m as u32 | 1 << 16),
            }
        }
        let mut index = 0usize;
        for b in &bits {
            let Some(b) = b else {
                return Err(Error::Encoding(format!(
                    "term |{}⟩ leaves a qubit slot empty",
                    state.describe(key)
                )));
            };
            for &x in b {
                index = index << 1 | x as usize;
            }
        }
        env_slots.extend(outside);
        groups
            .entry(env_slots)
            .or_insert_with(|| vec![C64::new(0.0, 0.0); 1 << nq])[index] += amp;
    }

    if groups.is_empty() {
        return Err(Error::ZeroProbability);
    }
    if groups.len() == 1 {
        let amps = groups.into_values().next().expect("one group");
        let (s, _) = PureState::normalized(register, amps)?;
        return Ok(QubitState::Pure(s));
    }
    let dim = 1 << nq;
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    for amps in groups.values() {
        let v = DVector::from_column_slice(amps);
        rho += &v * v.adjoint();
    }
    let (r, _) = DensityOp::normalized(register, rho)?;
    Ok(QubitState::Mixed(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::mode::ModeRegistry;
    use crate::qubit::NamedQubit;
    use std::sync::Arc;

    #[test]
    fn diagonal_photon_is_plus() {
        let r = Arc::new(ModeRegistry::new(["3"], 1).unwrap());
        let h = r.mode_index("3", Polarization::H, 0).unwrap();
        let v = r.mode_index("3", Polarization::V, 0).unwrap();
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let s = FockState::from_terms(r, [(vec![h], C64::new(s2, 0.0)), (vec![v], C64::new(s2, 0.0))]).unwrap();
        let q = to_qubits(&s, &[QubitEncoding::polarization("3", "3")]).unwrap();
        assert!(q.is_pure());
        let plus = PureState::single("3", NamedQubit::Plus);
        assert!((q.fidelity(&plus).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn internal_labels_decohere() {
        let r = Arc::new(ModeRegistry::new(["a"], 2).unwrap());
        let h0 = r.mode_index("a", Polarization::H, 0).unwrap();
        let v1 = r.mode_index("a", Polarization::V, 1).unwrap();
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let s = FockState::from_terms(r, [(vec![h0], C64::new(s2, 0.0)), (vec![v1], C64::new(s2, 0.0))]).unwrap();
        let QubitState::Mixed(rho) = to_qubits(&s, &[QubitEncoding::polarization("q", "a")]).unwrap() else {
            panic!("expected a mixed state");
        };
        assert!(rho.matrix()[(0, 1)].norm() < 1e-15);
        assert!((rho.purity() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn spatial_and_errors() {
        let r = Arc::new(ModeRegistry::new(["h", "v"], 1).unwrap());
        let a = r.mode_index("h", Polarization::H, 0).unwrap();
        let b = r.mode_index("v", Polarization::H, 0).unwrap();
        let s = FockState::from_terms(r.clone(), [(vec![b], C64::new(1.0, 0.0))]).unwrap();
        let q = to_qubits(&s, &[QubitEncoding::spatial("s", "h", "v")]).unwrap();
        assert!((q.fidelity(&PureState::single("s", NamedQubit::V)).unwrap() - 1.0).abs() < 1e-15);
        let two = FockState::from_terms(r, [(vec![a, b], C64::new(1.0, 0.0))]).unwrap();
        let err = to_qubits(&two, &[QubitEncoding::spatial("s", "h", "v")]).unwrap_err();
        assert!(err.to_string().contains("h:H"), "{err}");
    }
}
