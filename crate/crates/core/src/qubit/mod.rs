//! Exact state algebra on ordered, labelled qubit registers.

mod density;
pub(crate) mod kernel;
mod label;
mod pauli;
mod state;

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use density::DensityOp;
#[allow(unused_imports)]
pub(crate) use density::{hermitian_eigenvalues, hermitize};
pub(crate) use label::check_unique;
pub use label::{register, QubitLabel};
pub use pauli::{Pauli, PauliString, Phase};
pub use state::{NamedQubit, Projection, PureState};

use crate::{Error, Result, C64};

/// The four Bell states. `Φ±` are the correlated pair and `Ψ±` the
/// anti-correlated pair.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellKind {
    #[serde(rename = "Φ+", alias = "phi+")]
    PhiPlus,
    #[serde(rename = "Φ-", alias = "phi-", alias = "Φ−")]
    PhiMinus,
    #[serde(rename = "Ψ+", alias = "psi+")]
    PsiPlus,
    #[serde(rename = "Ψ-", alias = "psi-", alias = "Ψ−")]
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    /// Amplitudes on `(|HH⟩, |HV⟩, |VH⟩, |VV⟩)`.
    pub fn amplitudes(self) -> [C64; 4] {
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        let z = C64::new(0.0, 0.0);
        match self {
            BellKind::PhiPlus => [s, z, z, s],
            BellKind::PhiMinus => [s, z, z, -s],
            BellKind::PsiPlus => [z, s, s, z],
            BellKind::PsiMinus => [z, s, -s, z],
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BellKind::PhiPlus => "Φ+",
            BellKind::PhiMinus => "Φ-",
            BellKind::PsiPlus => "Ψ+",
            BellKind::PsiMinus => "Ψ-",
        }
    }

    pub fn is_phi(self) -> bool {
        matches!(self, BellKind::PhiPlus | BellKind::PhiMinus)
    }
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for BellKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Φ+" | "phi+" => Ok(BellKind::PhiPlus),
            "Φ-" | "Φ−" | "phi-" => Ok(BellKind::PhiMinus),
            "Ψ+" | "psi+" => Ok(BellKind::PsiPlus),
            "Ψ-" | "Ψ−" | "psi-" => Ok(BellKind::PsiMinus),
            _ => Err(Error::Parse(format!("unknown Bell state `{s}`"))),
        }
    }
}

/// Single-qubit measurement basis. Outcome bit 0 is the +1 eigenstate.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
    Y,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::Z, Basis::X, Basis::Y];

    /// `H`/`V`, `+`/`−` and `L`/`R` for bits 0/1.
    pub fn eigenstate(self, bit: u8) -> NamedQubit {
        match (self, bit & 1) {
            (Basis::Z, 0) => NamedQubit::H,
            (Basis::Z, _) => NamedQubit::V,
            (Basis::X, 0) => NamedQubit::Plus,
            (Basis::X, _) => NamedQubit::Minus,
            (Basis::Y, 0) => NamedQubit::L,
            (Basis::Y, _) => NamedQubit::R,
        }
    }

    pub fn pauli(self) -> Pauli {
        match self {
            Basis::Z => Pauli::Z,
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
        }
    }

    /// Outcome bit of a named eigenstate, if it belongs to this basis.
    pub fn bit_of(self, q: NamedQubit) -> Option<u8> {
        (0..2).find(|&b| self.eigenstate(b) == q)
    }
}

/// Either a pure state or a density operator.
#[derive(Clone, Debug, PartialEq)]
pub enum QubitState {
    Pure(PureState),
    Mixed(DensityOp),
}

impl QubitState {
    pub fn register(&self) -> &[QubitLabel] {
        match self {
            QubitState::Pure(s) => s.register(),
            QubitState::Mixed(r) => r.register(),
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, QubitState::Pure(_))
    }

    pub fn to_density(&self) -> DensityOp {
        match self {
            QubitState::Pure(s) => s.to_density(),
            QubitState::Mixed(r) => r.clone(),
        }
    }

    pub fn fidelity(&self, target: &PureState) -> Result<f64> {
        match self {
            QubitState::Pure(s) => s.fidelity(target),
            QubitState::Mixed(r) => r.fidelity(target),
        }
    }
}

pub fn bell_state(kind: BellKind, a: impl Into<QubitLabel>, b: impl Into<QubitLabel>) -> Result<PureState> {
    PureState::new(vec![a.into(), b.into()], kind.amplitudes().to_vec())
}

pub fn hadamard() -> DMatrix<C64> {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    DMatrix::from_row_slice(2, 2, &[s, s, s, -s])
}

/// `diag(1, e^{iφ})`, a relative phase on `|V⟩`.
pub fn phase_gate(phi: f64) -> DMatrix<C64> {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::from_polar(1.0, phi),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_amplitudes() {
        let phi = bell_state(BellKind::PhiPlus, "a", "b").unwrap();
        let s = FRAC_1_SQRT_2;
        assert!((phi.amplitudes()[0].re - s).abs() < 1e-15);
        assert!((phi.amplitudes()[3].re - s).abs() < 1e-15);
        let psi = bell_state(BellKind::PsiMinus, "a", "b").unwrap();
        assert!((psi.amplitudes()[1].re - s).abs() < 1e-15);
        assert!((psi.amplitudes()[2].re + s).abs() < 1e-15);
        assert!((phi.fidelity(&phi).unwrap() - 1.0).abs() < 1e-15);
        assert!(bell_state(BellKind::PhiPlus, "a", "a").is_err());
    }

    #[test]
    fn bell_basis_is_orthonormal() {
        for a in BellKind::ALL {
            for b in BellKind::ALL {
                let f = bell_state(a, "1", "2")
                    .unwrap()
                    .fidelity(&bell_state(b, "1", "2").unwrap())
                    .unwrap();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((f - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bell_projection_of_hh() {
        let hh = PureState::product([("a", NamedQubit::H), ("b", NamedQubit::H), ("c", NamedQubit::H)]).unwrap();
        let mut total = 0.0;
        for k in BellKind::ALL {
            let p = hh.project(&bell_state(k, "a", "b").unwrap()).unwrap().probability;
            let expect = if k.is_phi() { 0.5 } else { 0.0 };
            assert!((p - expect).abs() < 1e-15);
            total += p;
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symbols_parse_back() {
        for k in BellKind::ALL {
            assert_eq!(k.symbol().parse::<BellKind>().unwrap(), k);
        }
    }
}
