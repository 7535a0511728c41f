use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::density::DensityOp;
use super::kernel;
use super::label::{check_unique, permutation, position, positions, QubitLabel};
use super::pauli::PauliString;
use crate::{Error, Result, C64};

pub(crate) const NORM_TOL: f64 = 1e-12;

/// Normalized pure state of an ordered qubit register.
///
/// `|H⟩` is basis value 0 and `|V⟩` is 1; the first label of the register is
/// the most significant bit of the amplitude index.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    register: Vec<QubitLabel>,
    amplitudes: Vec<C64>,
}

/// Outcome of projecting part of a register onto a state.
#[derive(Clone, Debug)]
pub struct Projection {
    /// Renormalized state of the unmeasured qubits; `None` when the
    /// projection has zero probability.
    pub residual: Option<PureState>,
    pub probability: f64,
}

impl PureState {
    pub fn new(register: Vec<QubitLabel>, amplitudes: Vec<C64>) -> Result<Self> {
        check_unique(&register)?;
        let dim = 1usize << register.len();
        if amplitudes.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        let norm = norm_sqr(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState { register, amplitudes })
    }

    /// Normalize arbitrary amplitudes, returning the state and the squared
    /// norm it had.
    pub fn normalized(register: Vec<QubitLabel>, mut amplitudes: Vec<C64>) -> Result<(Self, f64)> {
        check_unique(&register)?;
        let dim = 1usize << register.len();
        if amplitudes.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        let norm = norm_sqr(&amplitudes);
        if norm <= f64::MIN_POSITIVE {
            return Err(Error::ZeroProbability);
        }
        let scale = 1.0 / norm.sqrt();
        amplitudes.iter_mut().for_each(|a| *a *= scale);
        Ok((PureState { register, amplitudes }, norm))
    }

    pub(crate) fn from_parts_unchecked(register: Vec<QubitLabel>, amplitudes: Vec<C64>) -> Self {
        PureState { register, amplitudes }
    }

    /// Computational basis state; `bits[k]` is 0 (H) or 1 (V) for qubit k.
    pub fn basis(register: Vec<QubitLabel>, bits: &[u8]) -> Result<Self> {
        if bits.len() != register.len() {
            return Err(Error::Dimension {
                expected: register.len(),
                got: bits.len(),
            });
        }
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b as usize & 1));
        let mut amps = vec![C64::new(0.0, 0.0); 1 << register.len()];
        amps[idx] = C64::new(1.0, 0.0);
        PureState::new(register, amps)
    }

    pub fn single(label: impl Into<QubitLabel>, named: NamedQubit) -> Self {
        PureState {
            register: vec![label.into()],
            amplitudes: named.amplitudes().to_vec(),
        }
    }

    /// Product of named single-qubit states on the listed labels.
    pub fn product<L: Into<QubitLabel>>(parts: impl IntoIterator<Item = (L, NamedQubit)>) -> Result<Self> {
        let mut iter = parts.into_iter();
        let (l, n) = iter
            .next()
            .ok_or_else(|| Error::InvalidParameter("empty product".into()))?;
        iter.try_fold(PureState::single(l, n), |acc, (l, n)| {
            acc.tensor(&PureState::single(l, n))
        })
    }

    pub fn register(&self) -> &[QubitLabel] {
        &self.register
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.register.len()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let mut register = self.register.clone();
        register.extend(other.register.iter().cloned());
        check_unique(&register)?;
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(PureState { register, amplitudes })
    }

    /// The same state with its register listed in `order`.
    pub fn reorder(&self, order: &[QubitLabel]) -> Result<PureState> {
        let perm = permutation(&self.register, order)?;
        let n = self.num_qubits();
        let mut amplitudes = vec![C64::new(0.0, 0.0); self.dim()];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            // `perm` maps new positions to old; invert by scanning.
            let new_idx = (0..n).fold(0usize, |acc, k| {
                let bit = (idx >> (n - 1 - perm[k])) & 1;
                acc | (bit << (n - 1 - k))
            });
            amplitudes[new_idx] = *a;
        }
        Ok(PureState {
            register: order.to_vec(),
            amplitudes,
        })
    }

    pub fn relabel(&self, mapping: &[(QubitLabel, QubitLabel)]) -> Result<PureState> {
        let register = relabel_register(&self.register, mapping)?;
        Ok(PureState {
            register,
            amplitudes: self.amplitudes.clone(),
        })
    }

    /// `⟨self|other⟩`, aligning `other` to this register order first.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        let other = other.reorder(&self.register)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn apply_pauli(&self, p: &PauliString) -> Result<PureState> {
        let mut amps = self.amplitudes.clone();
        let n = self.num_qubits();
        for (label, pauli) in p.factors() {
            let pos = position(&self.register, label)?;
            amps = kernel::apply_vec(&amps, n, &[pos], &pauli.matrix());
        }
        let ph = p.phase().value();
        amps.iter_mut().for_each(|a| *a *= ph);
        Ok(PureState::from_parts_unchecked(self.register.clone(), amps))
    }

    /// Apply a unitary on the listed labels (their order sets the bit order
    /// of `u`).
    pub fn apply_unitary(&self, labels: &[QubitLabel], u: &DMatrix<C64>) -> Result<PureState> {
        let pos = positions(&self.register, labels)?;
        let dim = 1usize << pos.len();
        if u.nrows() != dim || u.ncols() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: u.nrows(),
            });
        }
        let amps = kernel::apply_vec(&self.amplitudes, self.num_qubits(), &pos, u);
        Ok(PureState::from_parts_unchecked(self.register.clone(), amps))
    }

    /// Project the qubits of `subspace` onto it, leaving the rest.
    pub fn project(&self, subspace: &PureState) -> Result<Projection> {
        let row: Vec<C64> = subspace.amplitudes.iter().map(|a| a.conj()).collect();
        self.contract(subspace.register(), &row)
    }

    /// Contract a bra on `labels` against the state, returning the
    /// renormalized remainder and the squared norm of the unnormalized one.
    pub fn contract(&self, labels: &[QubitLabel], row: &[C64]) -> Result<Projection> {
        let pos = positions(&self.register, labels)?;
        if pos.len() >= self.num_qubits() {
            return Err(Error::RegisterMismatch(
                "projection must leave at least one qubit".into(),
            ));
        }
        if row.len() != 1 << pos.len() {
            return Err(Error::Dimension {
                expected: 1 << pos.len(),
                got: row.len(),
            });
        }
        let rest_register: Vec<QubitLabel> = self.register.iter().filter(|l| !labels.contains(l)).cloned().collect();
        let residual = kernel::contract_vec(&self.amplitudes, self.num_qubits(), &pos, row);
        let probability = norm_sqr(&residual);
        if probability <= 1e-300 {
            return Ok(Projection {
                residual: None,
                probability: 0.0,
            });
        }
        let (state, _) = PureState::normalized(rest_register, residual)?;
        Ok(Projection {
            residual: Some(state),
            probability,
        })
    }

    pub fn to_density(&self) -> DensityOp {
        DensityOp::from_pure(self)
    }
}

pub(crate) fn relabel_register(
    register: &[QubitLabel],
    mapping: &[(QubitLabel, QubitLabel)],
) -> Result<Vec<QubitLabel>> {
    let out: Vec<QubitLabel> = register
        .iter()
        .map(|l| {
            mapping
                .iter()
                .find(|(from, _)| from == l)
                .map(|(_, to)| to.clone())
                .unwrap_or_else(|| l.clone())
        })
        .collect();
    check_unique(&out)?;
    Ok(out)
}

pub(crate) fn norm_sqr(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// Single-qubit states named in the polarization vocabulary.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NamedQubit {
    #[serde(rename = "H")]
    H,
    #[serde(rename = "V")]
    V,
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-", alias = "−")]
    Minus,
    /// `(|H⟩ − i|V⟩)/√2`
    #[serde(rename = "R")]
    R,
    /// `(|H⟩ + i|V⟩)/√2`
    #[serde(rename = "L")]
    L,
}

impl NamedQubit {
    pub const ALL: [NamedQubit; 6] = [
        NamedQubit::H,
        NamedQubit::V,
        NamedQubit::Plus,
        NamedQubit::Minus,
        NamedQubit::R,
        NamedQubit::L,
    ];

    pub fn amplitudes(self) -> [C64; 2] {
        let s = FRAC_1_SQRT_2;
        match self {
            NamedQubit::H => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            NamedQubit::V => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            NamedQubit::Plus => [C64::new(s, 0.0), C64::new(s, 0.0)],
            NamedQubit::Minus => [C64::new(s, 0.0), C64::new(-s, 0.0)],
            NamedQubit::R => [C64::new(s, 0.0), C64::new(0.0, -s)],
            NamedQubit::L => [C64::new(s, 0.0), C64::new(0.0, s)],
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            NamedQubit::H => "H",
            NamedQubit::V => "V",
            NamedQubit::Plus => "+",
            NamedQubit::Minus => "-",
            NamedQubit::R => "R",
            NamedQubit::L => "L",
        }
    }

    /// The orthogonal partner within the same basis.
    pub fn orthogonal(self) -> NamedQubit {
        match self {
            NamedQubit::H => NamedQubit::V,
            NamedQubit::V => NamedQubit::H,
            NamedQubit::Plus => NamedQubit::Minus,
            NamedQubit::Minus => NamedQubit::Plus,
            NamedQubit::R => NamedQubit::L,
            NamedQubit::L => NamedQubit::R,
        }
    }
}

impl fmt::Display for NamedQubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for NamedQubit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" => Ok(NamedQubit::H),
            "V" => Ok(NamedQubit::V),
            "+" => Ok(NamedQubit::Plus),
            "-" | "−" => Ok(NamedQubit::Minus),
            "R" => Ok(NamedQubit::R),
            "L" => Ok(NamedQubit::L),
            _ => Err(Error::Parse(format!("unknown single-qubit state `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{bell_state, BellKind, Pauli};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn tensor_of_basis_states() {
        let hh = PureState::single("1", NamedQubit::H)
            .tensor(&PureState::single("2", NamedQubit::H))
            .unwrap();
        assert_eq!(hh.amplitudes()[0], c(1.0));
        let pp = PureState::product([("1", NamedQubit::Plus), ("2", NamedQubit::Plus)]).unwrap();
        for a in pp.amplitudes() {
            assert!((a - c(0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn tensor_of_bell_pairs_has_four_equal_terms() {
        let a = bell_state(BellKind::PhiPlus, "1", "2").unwrap();
        let b = bell_state(BellKind::PhiPlus, "3", "4").unwrap();
        let ab = a.tensor(&b).unwrap();
        let nonzero: Vec<_> = ab.amplitudes().iter().filter(|x| x.norm() > 1e-12).collect();
        assert_eq!(nonzero.len(), 4);
        assert!(nonzero.iter().all(|x| (**x - c(0.5)).norm() < 1e-15));
    }

    #[test]
    fn tensor_rejects_overlap() {
        let a = PureState::single("1", NamedQubit::H);
        assert!(matches!(a.tensor(&a), Err(Error::DuplicateLabel(_))));
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(PureState::new(vec!["1".into()], vec![c(1.0), c(1.0)]).is_err());
    }

    #[test]
    fn pauli_actions() {
        let h = PureState::single("1", NamedQubit::H);
        let v = h.apply_pauli(&PauliString::single("1", Pauli::X)).unwrap();
        assert!((v.fidelity(&PureState::single("1", NamedQubit::V)).unwrap() - 1.0).abs() < 1e-15);
        let plus = PureState::single("1", NamedQubit::Plus);
        let minus = plus.apply_pauli(&PauliString::single("1", Pauli::Z)).unwrap();
        assert!((minus.fidelity(&PureState::single("1", NamedQubit::Minus)).unwrap() - 1.0).abs() < 1e-15);
        assert!(h.apply_pauli(&PauliString::single("9", Pauli::X)).is_err());
    }

    #[test]
    fn zz_turns_phi_plus_into_phi_minus() {
        let phi = bell_state(BellKind::PhiPlus, "4", "6").unwrap();
        let zz = PauliString::parse("Z4 Z6").unwrap();
        // Z4 Z6 leaves Φ⁺ unchanged; a single Z flips it to Φ⁻.
        let z4 = PauliString::parse("Z4").unwrap();
        assert!((phi.apply_pauli(&zz).unwrap().fidelity(&phi).unwrap() - 1.0).abs() < 1e-15);
        let flipped = phi.apply_pauli(&z4).unwrap();
        assert!(flipped.fidelity(&phi).unwrap() < 1e-15);
        let phi_minus = bell_state(BellKind::PhiMinus, "4", "6").unwrap();
        assert!((flipped.fidelity(&phi_minus).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn project_half_of_bell_pair() {
        let phi = bell_state(BellKind::PhiPlus, "1", "2").unwrap();
        let p = phi.project(&PureState::single("1", NamedQubit::H)).unwrap();
        assert!((p.probability - 0.5).abs() < 1e-15);
        let res = p.residual.unwrap();
        assert_eq!(res.register(), &[QubitLabel::from("2")]);
        assert!((res.fidelity(&PureState::single("2", NamedQubit::H)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_probability_projection_is_flagged() {
        let hh = PureState::product([("1", NamedQubit::H), ("2", NamedQubit::H)]).unwrap();
        let p = hh.project(&PureState::single("1", NamedQubit::V)).unwrap();
        assert!(p.residual.is_none());
        assert_eq!(p.probability, 0.0);
    }

    #[test]
    fn reorder_permutes_amplitudes() {
        let hv = PureState::product([("1", NamedQubit::H), ("2", NamedQubit::V)]).unwrap();
        let vh = hv.reorder(&["2".into(), "1".into()]).unwrap();
        assert_eq!(vh.amplitudes()[2], c(1.0));
        assert!((hv.inner(&vh).unwrap() - c(1.0)).norm() < 1e-15);
    }
}
