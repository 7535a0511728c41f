use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::bsm::BsmOutcome;
use super::gate::GateKind;
use super::resource::ResourceState;
use crate::qubit::kernel;
use crate::qubit::{BellKind, Pauli, PauliString, Phase, PureState, QubitLabel};
use crate::{Error, Result, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectionEntry {
    pub first: BellKind,
    pub second: BellKind,
    pub correction: PauliString,
}

/// Pauli correction on the output qubits for each pair of Bell outcomes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectionTable {
    pub gate: GateKind,
    pub entries: Vec<CorrectionEntry>,
}

const ORACLE_TOL: f64 = 1e-9;

impl CorrectionTable {
    /// Pauli-frame oracle. For every outcome pair the collapsed output map
    /// `M` (columns: the four computational inputs) is computed from the
    /// ideal resource; `M·U†` must equal `c·P` for a Pauli `P`, and the
    /// correction is the phased Pauli `C` with `C·M = |c|·U`.
    pub fn derive(gate: GateKind) -> Result<Self> {
        let resource = ResourceState::ideal(gate.resource_kind());
        let crate::qubit::QubitState::Pure(chi) = &resource.state else {
            unreachable!("ideal resources are pure")
        };
        let inputs = gate.inputs();
        let outputs = gate.outputs();
        let joints: Vec<PureState> = (0..4u8)
            .map(|j| PureState::basis(inputs.to_vec(), &[j >> 1, j & 1])?.tensor(chi))
            .collect::<Result<_>>()?;
        let register = joints[0].register().to_vec();
        let [(a1, b1), (a2, b2)] = gate.bsm_pairs();
        let measured = [a1, b1, a2, b2];
        let pos: Vec<usize> = measured
            .iter()
            .map(|l| {
                register
                    .iter()
                    .position(|r| r == l)
                    .ok_or_else(|| Error::UnknownLabel(l.to_string()))
            })
            .collect::<Result<_>>()?;
        let rest: Vec<QubitLabel> = register.iter().filter(|l| !measured.contains(l)).cloned().collect();
        if rest != outputs {
            return Err(Error::RegisterMismatch(format!("oracle left {rest:?}")));
        }
        let u = gate.unitary();
        let paulis = two_qubit_paulis(&outputs)?;

        let mut entries = Vec::with_capacity(16);
        for first in BellKind::ALL {
            for second in BellKind::ALL {
                let r1 = first.amplitudes().map(|a| a.conj());
                let r2 = second.amplitudes().map(|a| a.conj());
                // sub-index bits follow `measured`: (a1, b1, a2, b2)
                let row: Vec<C64> = (0..16).map(|s| r1[s >> 2] * r2[s & 3]).collect();
                let mut m = DMatrix::<C64>::zeros(4, 4);
                for (j, joint) in joints.iter().enumerate() {
                    let col = kernel::contract_vec(joint.amplitudes(), register.len(), &pos, &row);
                    for (i, a) in col.into_iter().enumerate() {
                        m[(i, j)] = a;
                    }
                }
                let n = &m * u.adjoint();
                let (p, pm) = paulis
                    .iter()
                    .max_by(|x, y| overlap(&x.1, &n).norm().total_cmp(&overlap(&y.1, &n).norm()))
                    .expect("sixteen Paulis");
                let c = overlap(pm, &n);
                if (&n - pm * c).norm() > ORACLE_TOL || c.norm() < ORACLE_TOL {
                    return Err(Error::Protocol(format!(
                        "outcome ({first}, {second}) does not collapse to a Pauli frame"
                    )));
                }
                let quarter = c.arg() / FRAC_PI_2;
                let k = quarter.round();
                if (quarter - k).abs() > ORACLE_TOL {
                    return Err(Error::Protocol(format!(
                        "outcome ({first}, {second}) has frame phase {:.6} rad",
                        c.arg()
                    )));
                }
                let phase = Phase::from_power((-(k as i64)).rem_euclid(4) as u8);
                entries.push(CorrectionEntry {
                    first,
                    second,
                    correction: p.clone().with_phase(phase),
                });
            }
        }
        Ok(CorrectionTable { gate, entries })
    }

    /// Oracle table, computed once per gate.
    pub fn derived(gate: GateKind) -> &'static CorrectionTable {
        static CACHE: [OnceLock<CorrectionTable>; 2] = [OnceLock::new(), OnceLock::new()];
        let slot = match gate {
            GateKind::Cnot => &CACHE[0],
            GateKind::Cphase => &CACHE[1],
        };
        slot.get_or_init(|| CorrectionTable::derive(gate).expect("the ideal resources admit a Pauli frame"))
    }

    pub fn get(&self, first: BellKind, second: BellKind) -> Option<&PauliString> {
        self.entries
            .iter()
            .find(|e| e.first == first && e.second == second)
            .map(|e| &e.correction)
    }

    /// Lookup by analyzer outcome; `Fail` has no correction.
    pub fn get_outcomes(&self, first: BsmOutcome, second: BsmOutcome) -> Result<&PauliString> {
        match (first, second) {
            (BsmOutcome::Bell(a), BsmOutcome::Bell(b)) => {
                self.get(a, b).ok_or(Error::MissingEntry(format!("{a}, {b}")))
            }
            _ => Err(Error::Protocol("a failed Bell measurement has no correction".into())),
        }
    }
}

fn overlap(p: &DMatrix<C64>, n: &DMatrix<C64>) -> C64 {
    (p.adjoint() * n).trace() / C64::new(4.0, 0.0)
}

fn two_qubit_paulis(labels: &[QubitLabel; 2]) -> Result<Vec<(PauliString, DMatrix<C64>)>> {
    let mut out = Vec::with_capacity(16);
    for p in Pauli::ALL {
        for q in Pauli::ALL {
            let s = PauliString::from_factors(Phase::ONE, [(labels[0].clone(), p), (labels[1].clone(), q)]);
            let m = s.matrix_on(labels)?;
            out.push((s, m));
        }
    }
    Ok(out)
}

/// Correction for the C-NOT; `None` when either analyzer failed.
pub fn cnot_correction(first: BsmOutcome, second: BsmOutcome) -> Option<PauliString> {
    CorrectionTable::derived(GateKind::Cnot)
        .get_outcomes(first, second)
        .ok()
        .cloned()
}

/// Correction for the C-Phase; `None` when either analyzer failed.
pub fn cphase_correction(first: BsmOutcome, second: BsmOutcome) -> Option<PauliString> {
    CorrectionTable::derived(GateKind::Cphase)
        .get_outcomes(first, second)
        .ok()
        .cloned()
}

/// How a printed operator relates to the collapsed output.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableRelation {
    /// The collapsed output is `operator · U|in⟩`.
    Byproduct,
    /// Applying `operator` to the collapsed output gives `U|in⟩`.
    Correction,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub first: BellKind,
    pub second: BellKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrintedEntry {
    pub first: BellKind,
    pub second: BellKind,
    /// Operator product as printed, factors left to right.
    pub operator: String,
}

/// A printed correction table, kept verbatim, with the cells known to
/// disagree with the oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrintedTable {
    pub gate: GateKind,
    pub relation: TableRelation,
    pub entries: Vec<PrintedEntry>,
    #[serde(default)]
    pub errata: Vec<Cell>,
}

const CNOT_TABLE: &str = include_str!("../../assets/cnot_byproducts.json");
const CPHASE_TABLE: &str = include_str!("../../assets/cphase_corrections.json");

impl PrintedTable {
    pub fn builtin(gate: GateKind) -> PrintedTable {
        let text = match gate {
            GateKind::Cnot => CNOT_TABLE,
            GateKind::Cphase => CPHASE_TABLE,
        };
        PrintedTable::from_json(text).expect("bundled table parses")
    }

    pub fn from_json(text: &str) -> Result<PrintedTable> {
        let t: PrintedTable = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        for e in &t.entries {
            PauliString::parse(&e.operator)?;
        }
        Ok(t)
    }

    /// Cell-by-cell comparison against a derived table.
    pub fn compare(&self, derived: &CorrectionTable) -> Result<TableDiff> {
        if derived.gate != self.gate {
            return Err(Error::Protocol("tables describe different gates".into()));
        }
        let mut cells = Vec::with_capacity(16);
        for d in &derived.entries {
            let printed = self
                .entries
                .iter()
                .find(|e| e.first == d.first && e.second == d.second)
                .ok_or_else(|| Error::MissingEntry(format!("printed cell ({}, {})", d.first, d.second)))?;
            let op = PauliString::parse(&printed.operator)?;
            let expected = match self.relation {
                TableRelation::Correction => d.correction.clone(),
                TableRelation::Byproduct => d.correction.adjoint(),
            };
            cells.push(CellDiff {
                first: d.first,
                second: d.second,
                printed: printed.operator.clone(),
                derived: expected.clone(),
                agrees_up_to_phase: op.eq_up_to_phase(&expected),
                agrees_exactly: op == expected,
            });
        }
        Ok(TableDiff {
            gate: self.gate,
            relation: self.relation,
            cells,
            expected_errata: self.errata.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellDiff {
    pub first: BellKind,
    pub second: BellKind,
    pub printed: String,
    /// The oracle's operator in the printed table's relation.
    pub derived: PauliString,
    pub agrees_up_to_phase: bool,
    pub agrees_exactly: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableDiff {
    pub gate: GateKind,
    pub relation: TableRelation,
    pub cells: Vec<CellDiff>,
    pub expected_errata: Vec<Cell>,
}

impl TableDiff {
    /// Cells that differ beyond a global phase.
    pub fn discrepancies(&self) -> Vec<Cell> {
        let mut v: Vec<Cell> = self
            .cells
            .iter()
            .filter(|c| !c.agrees_up_to_phase)
            .map(|c| Cell {
                first: c.first,
                second: c.second,
            })
            .collect();
        v.sort();
        v
    }

    /// True when the discrepancies are exactly the documented errata.
    pub fn matches_errata(&self) -> bool {
        let mut e = self.expected_errata.clone();
        e.sort();
        e == self.discrepancies()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(s: &str) -> BellKind {
        s.parse().unwrap()
    }

    #[test]
    fn oracle_tables_are_complete() {
        for gate in GateKind::ALL {
            let t = CorrectionTable::derived(gate);
            assert_eq!(t.entries.len(), 16);
            assert!(t.get(BellKind::PhiPlus, BellKind::PhiPlus).unwrap().is_identity());
        }
    }

    #[test]
    fn known_cells() {
        let c = CorrectionTable::derived(GateKind::Cnot);
        assert!(c
            .get(k("Φ-"), k("Φ+"))
            .unwrap()
            .eq_up_to_phase(&PauliString::parse("Z4 Z6").unwrap()));
        let p = CorrectionTable::derived(GateKind::Cphase);
        assert!(p
            .get(k("Ψ+"), k("Φ+"))
            .unwrap()
            .eq_up_to_phase(&PauliString::parse("X4' Z6'").unwrap()));
        assert!(p
            .get(k("Ψ-"), k("Ψ-"))
            .unwrap()
            .eq_up_to_phase(&PauliString::parse("X4' X6'").unwrap()));
    }

    #[test]
    fn printed_tables_diff_to_errata() {
        for gate in GateKind::ALL {
            let diff = PrintedTable::builtin(gate)
                .compare(CorrectionTable::derived(gate))
                .unwrap();
            assert!(diff.matches_errata(), "{gate:?}: {:?}", diff.discrepancies());
        }
    }

    #[test]
    fn corrupted_table_is_detected() {
        let mut t = PrintedTable::builtin(GateKind::Cphase);
        t.entries[0].operator = "X4'".into();
        let diff = t.compare(CorrectionTable::derived(GateKind::Cphase)).unwrap();
        assert!(!diff.matches_errata());
    }

    #[test]
    fn fail_has_no_correction() {
        assert!(cnot_correction(BsmOutcome::Fail, BsmOutcome::Bell(BellKind::PhiPlus)).is_none());
        assert!(cphase_correction(BsmOutcome::Bell(BellKind::PhiPlus), BsmOutcome::Bell(BellKind::PhiPlus)).is_some());
    }
}
