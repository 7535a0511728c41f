use nalgebra::DMatrix;

use super::kernel;
use super::label::{check_unique, permutation, position, positions, QubitLabel};
use super::pauli::PauliString;
use super::state::{relabel_register, PureState};
use crate::{Error, Result, C64};

pub(crate) const DENSITY_TOL: f64 = 1e-10;

/// Hermitian, unit-trace, positive semidefinite operator on a qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOp {
    register: Vec<QubitLabel>,
    matrix: DMatrix<C64>,
}

impl DensityOp {
    /// Validating constructor.
    pub fn new(register: Vec<QubitLabel>, matrix: DMatrix<C64>) -> Result<Self> {
        check_unique(&register)?;
        let dim = 1usize << register.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: matrix.nrows(),
            });
        }
        let herm = (&matrix - matrix.adjoint()).norm();
        if herm > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = hermitian_eigenvalues(&matrix).into_iter().fold(f64::INFINITY, f64::min);
        if min < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityOp { register, matrix })
    }

    pub(crate) fn from_parts_unchecked(register: Vec<QubitLabel>, matrix: DMatrix<C64>) -> Self {
        DensityOp { register, matrix }
    }

    /// Normalize a positive operator to unit trace, returning its old trace.
    pub fn normalized(register: Vec<QubitLabel>, matrix: DMatrix<C64>) -> Result<(Self, f64)> {
        let tr = matrix.trace().re;
        if tr <= 1e-300 {
            return Err(Error::ZeroProbability);
        }
        let m = matrix / C64::new(tr, 0.0);
        Ok((DensityOp::new(register, hermitize(m))?, tr))
    }

    pub fn from_pure(state: &PureState) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        DensityOp {
            register: state.register().to_vec(),
            matrix: &v * v.adjoint(),
        }
    }

    pub fn maximally_mixed(register: Vec<QubitLabel>) -> Result<Self> {
        check_unique(&register)?;
        let dim = 1usize << register.len();
        let m = DMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0);
        Ok(DensityOp { register, matrix: m })
    }

    /// Convex combination; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, DensityOp)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let register = first.register.clone();
        let dim = first.matrix.nrows();
        let mut m = DMatrix::zeros(dim, dim);
        let mut total = 0.0;
        for (w, rho) in parts {
            if *w < 0.0 {
                return Err(Error::InvalidParameter(format!("negative weight {w}")));
            }
            let aligned = rho.reorder(&register)?;
            m += aligned.matrix * C64::new(*w, 0.0);
            total += w;
        }
        if (total - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidParameter(format!("weights sum to {total}")));
        }
        Ok(DensityOp { register, matrix: m })
    }

    pub fn register(&self) -> &[QubitLabel] {
        &self.register
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn num_qubits(&self) -> usize {
        self.register.len()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn tensor(&self, other: &DensityOp) -> Result<DensityOp> {
        let mut register = self.register.clone();
        register.extend(other.register.iter().cloned());
        check_unique(&register)?;
        Ok(DensityOp {
            register,
            matrix: kernel::kron(&self.matrix, &other.matrix),
        })
    }

    pub fn reorder(&self, order: &[QubitLabel]) -> Result<DensityOp> {
        let perm = permutation(&self.register, order)?;
        let n = self.num_qubits();
        let dim = self.matrix.nrows();
        // new index k's bit comes from old position perm[k]
        let map: Vec<usize> = (0..dim).map(|new| inverse_permute(new, n, &perm)).collect();
        let m = DMatrix::from_fn(dim, dim, |i, j| self.matrix[(map[i], map[j])]);
        Ok(DensityOp {
            register: order.to_vec(),
            matrix: m,
        })
    }

    pub fn relabel(&self, mapping: &[(QubitLabel, QubitLabel)]) -> Result<DensityOp> {
        Ok(DensityOp {
            register: relabel_register(&self.register, mapping)?,
            matrix: self.matrix.clone(),
        })
    }

    pub fn apply_pauli(&self, p: &PauliString) -> Result<DensityOp> {
        let n = self.num_qubits();
        let mut m = self.matrix.clone();
        for (label, pauli) in p.factors() {
            let pos = position(&self.register, label)?;
            m = kernel::conjugate(&m, n, &[pos], &pauli.matrix());
        }
        Ok(DensityOp {
            register: self.register.clone(),
            matrix: m,
        })
    }

    pub fn apply_unitary(&self, labels: &[QubitLabel], u: &DMatrix<C64>) -> Result<DensityOp> {
        let pos = positions(&self.register, labels)?;
        if u.nrows() != 1 << pos.len() {
            return Err(Error::Dimension {
                expected: 1 << pos.len(),
                got: u.nrows(),
            });
        }
        Ok(DensityOp {
            register: self.register.clone(),
            matrix: kernel::conjugate(&self.matrix, self.num_qubits(), &pos, u),
        })
    }

    /// `Tr(ρ |t⟩⟨t|)`.
    pub fn fidelity(&self, target: &PureState) -> Result<f64> {
        let t = target
            .reorder(&self.register)
            .map_err(|_| Error::RegisterMismatch("fidelity target must cover the same qubits".into()))?;
        let v = nalgebra::DVector::from_column_slice(t.amplitudes());
        let f = (v.adjoint() * &self.matrix * &v)[(0, 0)].re;
        Ok(f.clamp(0.0, 1.0))
    }

    /// `Tr(ρ P)`; the phase of `p` is included, so non-Hermitian strings
    /// return the real part.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        let pm = p.matrix_on(&self.register)?;
        Ok((&self.matrix * pm).trace().re)
    }

    pub fn partial_trace(&self, keep: &[QubitLabel]) -> Result<DensityOp> {
        if keep.is_empty() {
            return Err(Error::InvalidParameter(
                "partial trace must keep at least one qubit".into(),
            ));
        }
        positions(&self.register, keep)?;
        let drop: Vec<usize> = self
            .register
            .iter()
            .enumerate()
            .filter(|(_, l)| !keep.contains(l))
            .map(|(i, _)| i)
            .collect();
        let remaining: Vec<QubitLabel> = self.register.iter().filter(|l| keep.contains(l)).cloned().collect();
        let m = kernel::trace_out(&self.matrix, self.num_qubits(), &drop);
        DensityOp::from_parts_unchecked(remaining, m).reorder(keep)
    }

    /// Wootters concurrence of a two-qubit state.
    pub fn concurrence(&self) -> Result<f64> {
        if self.num_qubits() != 2 {
            return Err(Error::RegisterMismatch(format!(
                "concurrence needs 2 qubits, got {}",
                self.num_qubits()
            )));
        }
        let yy = PauliString::from_factors(
            super::pauli::Phase::ONE,
            [
                (self.register[0].clone(), super::Pauli::Y),
                (self.register[1].clone(), super::Pauli::Y),
            ],
        )
        .matrix_on(&self.register)?;
        let rho = &self.matrix;
        let tilde = &yy * rho.map(|z| z.conj()) * &yy;
        // √ρ ρ̃ √ρ is Hermitian PSD with eigenvalues λᵢ².
        let sqrt_rho = hermitian_sqrt(rho);
        let inner = hermitize(&sqrt_rho * tilde * &sqrt_rho);
        let mut lambdas: Vec<f64> = hermitian_eigenvalues(&inner)
            .into_iter()
            .map(|e| e.max(0.0).sqrt())
            .collect();
        lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
    }

    /// Measurement bra on the listed qubits; returns the unnormalized
    /// operator on the remaining register.
    pub(crate) fn contract(&self, labels: &[QubitLabel], row: &[C64]) -> Result<(Vec<QubitLabel>, DMatrix<C64>)> {
        let pos = positions(&self.register, labels)?;
        let rest: Vec<QubitLabel> = self.register.iter().filter(|l| !labels.contains(l)).cloned().collect();
        Ok((rest, kernel::contract_mat(&self.matrix, self.num_qubits(), &pos, row)))
    }
}

fn inverse_permute(new_idx: usize, n: usize, perm: &[usize]) -> usize {
    perm.iter().enumerate().fold(0usize, |acc, (k, &src)| {
        let bit = (new_idx >> (n - 1 - k)) & 1;
        acc | (bit << (n - 1 - src))
    })
}

pub(crate) fn hermitize(m: DMatrix<C64>) -> DMatrix<C64> {
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    hermitize(m.clone()).symmetric_eigenvalues().iter().copied().collect()
}

pub(crate) fn hermitian_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = hermitize(m.clone()).symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| C64::new(e.max(0.0).sqrt(), 0.0)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{bell_state, BellKind, NamedQubit, Pauli};

    fn phi() -> DensityOp {
        bell_state(BellKind::PhiPlus, "1", "2").unwrap().to_density()
    }

    #[test]
    fn fidelity_examples() {
        let target = bell_state(BellKind::PhiPlus, "1", "2").unwrap();
        assert!((phi().fidelity(&target).unwrap() - 1.0).abs() < 1e-15);
        let mixed = DensityOp::maximally_mixed(vec!["1".into(), "2".into()]).unwrap();
        assert!((mixed.fidelity(&target).unwrap() - 0.25).abs() < 1e-15);
        let other = bell_state(BellKind::PhiPlus, "1", "3").unwrap();
        assert!(mixed.fidelity(&other).is_err());
    }

    #[test]
    fn expectation_examples() {
        let zz = PauliString::parse("Z1 Z2").unwrap();
        let yy = PauliString::parse("Y1 Y2").unwrap();
        let xx = PauliString::parse("X1 X2").unwrap();
        assert!((phi().pauli_expectation(&zz).unwrap() - 1.0).abs() < 1e-15);
        assert!((phi().pauli_expectation(&yy).unwrap() + 1.0).abs() < 1e-15);
        let mixed = DensityOp::maximally_mixed(vec!["1".into(), "2".into()]).unwrap();
        assert!(mixed.pauli_expectation(&xx).unwrap().abs() < 1e-15);
    }

    #[test]
    fn partial_trace_examples() {
        let half = phi().partial_trace(&["1".into()]).unwrap();
        let expect = DMatrix::identity(2, 2) * C64::new(0.5, 0.0);
        assert!((half.matrix() - expect).norm() < 1e-15);
        let all = phi().partial_trace(&["1".into(), "2".into()]).unwrap();
        assert!((all.matrix() - phi().matrix()).norm() < 1e-15);
        let hh = PureState::product([("1", NamedQubit::H), ("2", NamedQubit::H)])
            .unwrap()
            .to_density();
        let kept = hh.partial_trace(&["2".into()]).unwrap();
        assert!((kept.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(phi().partial_trace(&[]).is_err());
    }

    #[test]
    fn concurrence_examples() {
        assert!((phi().concurrence().unwrap() - 1.0).abs() < 1e-9);
        let hh = PureState::product([("1", NamedQubit::H), ("2", NamedQubit::H)])
            .unwrap()
            .to_density();
        assert!(hh.concurrence().unwrap().abs() < 1e-9);
        let one = PureState::single("1", NamedQubit::H).to_density();
        assert!(one.concurrence().is_err());
    }

    #[test]
    fn validation_rejects_bad_operators() {
        let reg = vec![QubitLabel::from("1")];
        let not_herm = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.3, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        assert!(DensityOp::new(reg.clone(), not_herm).is_err());
        let negative = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.5, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-0.5, 0.0),
            ],
        );
        assert!(DensityOp::new(reg, negative).is_err());
    }

    #[test]
    fn reorder_matches_pure_reorder() {
        let s = PureState::product([("1", NamedQubit::H), ("2", NamedQubit::Plus), ("3", NamedQubit::R)]).unwrap();
        let order: Vec<QubitLabel> = vec!["3".into(), "1".into(), "2".into()];
        let a = s.to_density().reorder(&order).unwrap();
        let b = s.reorder(&order).unwrap().to_density();
        assert!((a.matrix() - b.matrix()).norm() < 1e-14);
    }

    #[test]
    fn pauli_conjugation_matches_pure() {
        let s = PureState::product([("1", NamedQubit::Plus), ("2", NamedQubit::L)]).unwrap();
        let p = PauliString::from_factors(crate::Phase::I, [("1", Pauli::Y), ("2", Pauli::Z)]);
        let a = s.to_density().apply_pauli(&p).unwrap();
        let b = s.apply_pauli(&p).unwrap().to_density();
        assert!((a.matrix() - b.matrix()).norm() < 1e-14);
    }
}
