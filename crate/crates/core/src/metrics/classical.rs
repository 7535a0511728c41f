use std::fmt;

use serde::{Deserialize, Serialize};

use super::Estimate;
use crate::noise::Setting;
use crate::protocols::GateKind;
use crate::qubit::{NamedQubit, PureState};
use crate::{Basis, Error, Result};

/// Named product state of the two qubits, qubit 1 first.
pub type Pair = [NamedQubit; 2];

fn pair_label(p: &Pair) -> String {
    format!("{}{}", p[0], p[1])
}

fn basis_of(q: NamedQubit) -> Basis {
    Basis::ALL
        .into_iter()
        .find(|b| b.bit_of(q).is_some())
        .expect("every named state is a basis state")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub input: Pair,
    pub output: Pair,
    pub probability: Estimate,
}

/// `P(output | input)` for named product inputs and outputs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConditionalTable {
    pub entries: Vec<TableEntry>,
}

impl ConditionalTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, input: Pair, output: Pair, probability: Estimate) {
        match self.entries.iter_mut().find(|e| e.input == input && e.output == output) {
            Some(e) => e.probability = probability,
            None => self.entries.push(TableEntry {
                input,
                output,
                probability,
            }),
        }
    }

    pub fn get(&self, input: Pair, output: Pair) -> Result<Estimate> {
        self.entries
            .iter()
            .find(|e| e.input == input && e.output == output)
            .map(|e| e.probability)
            .ok_or_else(|| Error::MissingEntry(format!("P({}|{})", pair_label(&output), pair_label(&input))))
    }

    /// Add the four outcomes of one setting, indexed by `2·b₁ + b₂`.
    pub fn add_setting(&mut self, input: Pair, bases: [Basis; 2], p: [Estimate; 4]) {
        for (i, est) in p.into_iter().enumerate() {
            let out = [bases[0].eigenstate((i >> 1) as u8), bases[1].eigenstate(i as u8)];
            self.insert(input, out, est);
        }
    }

    /// Every complete set of outcomes for an input sums to one, within
    /// `1e-9` for exact entries or 4σ for sampled ones.
    pub fn check_normalization(&self) -> Result<()> {
        for e in &self.entries {
            let bases = e.output.map(basis_of);
            let group: Vec<&TableEntry> = self
                .entries
                .iter()
                .filter(|f| f.input == e.input && f.output.map(basis_of) == bases)
                .collect();
            if group.len() < 4 {
                continue;
            }
            let sum: f64 = group.iter().map(|f| f.probability.value).sum();
            let sd: f64 = group.iter().map(|f| f.probability.sd.powi(2)).sum::<f64>().sqrt();
            if (sum - 1.0).abs() > (4.0 * sd).max(1e-9) {
                return Err(Error::Protocol(format!(
                    "outcomes for input {} sum to {sum}",
                    pair_label(&e.input)
                )));
            }
        }
        Ok(())
    }
}

/// The conditional classical fidelities of a two-qubit gate: four product
/// inputs from `input_bases`, outputs analysed in `output_bases`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassicalFidelity {
    /// Computational basis in and out.
    TruthTable,
    /// Qubit 1 in `Z`, qubit 2 in `X`.
    Zx,
    /// Qubit 1 in `X`, qubit 2 in `Z`.
    Xz,
    /// Both in `X`.
    Xx,
    /// `X` inputs analysed in the circular basis.
    Parallelism,
}

impl ClassicalFidelity {
    pub const ALL: [ClassicalFidelity; 5] = [
        ClassicalFidelity::TruthTable,
        ClassicalFidelity::Zx,
        ClassicalFidelity::Xz,
        ClassicalFidelity::Xx,
        ClassicalFidelity::Parallelism,
    ];

    pub fn input_bases(self) -> [Basis; 2] {
        match self {
            ClassicalFidelity::TruthTable => [Basis::Z, Basis::Z],
            ClassicalFidelity::Zx => [Basis::Z, Basis::X],
            ClassicalFidelity::Xz => [Basis::X, Basis::Z],
            ClassicalFidelity::Xx | ClassicalFidelity::Parallelism => [Basis::X, Basis::X],
        }
    }

    pub fn output_bases(self) -> [Basis; 2] {
        match self {
            ClassicalFidelity::Parallelism => [Basis::Y, Basis::Y],
            other => other.input_bases(),
        }
    }

    pub fn inputs(self) -> [Pair; 4] {
        let [a, b] = self.input_bases();
        [0u8, 1, 2, 3].map(|i| [a.eigenstate(i >> 1), b.eigenstate(i & 1)])
    }

    pub fn settings(self) -> Vec<Setting> {
        self.inputs()
            .into_iter()
            .map(|p| Setting::named(p[0], p[1], self.output_bases()))
            .collect()
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ClassicalFidelity::TruthTable => "F_zz",
            ClassicalFidelity::Zx => "F_zx",
            ClassicalFidelity::Xz => "F_xz",
            ClassicalFidelity::Xx => "F_xx",
            ClassicalFidelity::Parallelism => "F_xx_circ",
        }
    }
}

impl fmt::Display for ClassicalFidelity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

const ORACLE_TOL: f64 = 1e-9;

/// Outputs the ideal gate produces from `input` in the figure's output
/// bases, with their probabilities.
pub fn accepted_outcomes(gate: GateKind, fid: ClassicalFidelity, input: Pair) -> Result<Vec<(Pair, f64)>> {
    let [l1, l2] = gate.inputs();
    let ideal = gate.reference(&PureState::product([(l1, input[0]), (l2, input[1])])?)?;
    let [o1, o2] = gate.outputs();
    let bases = fid.output_bases();
    let mut out = Vec::new();
    for i in 0..4u8 {
        let pair = [bases[0].eigenstate(i >> 1), bases[1].eigenstate(i & 1)];
        let proj = PureState::product([(o1.clone(), pair[0]), (o2.clone(), pair[1])])?;
        let p = ideal.fidelity(&proj)?;
        if p > ORACLE_TOL {
            out.push((pair, p));
        }
    }
    Ok(out)
}

/// Quarter-sum over the four inputs of the probability of the accepted
/// outputs. Exactly one for the ideal gate.
pub fn classical_fidelity(gate: GateKind, fid: ClassicalFidelity, table: &ConditionalTable) -> Result<Estimate> {
    let mut terms = Vec::new();
    for input in fid.inputs() {
        for (out, _) in accepted_outcomes(gate, fid, input)? {
            terms.push((0.25, table.get(input, out)?));
        }
    }
    Ok(Estimate::linear(&terms, 0.0))
}

/// `¼[P(HH|HH) + P(VH|VH) + P(VV|HV) + P(HV|VV)]` of the C-NOT.
pub fn truth_table_fidelity(table: &ConditionalTable) -> Result<Estimate> {
    classical_fidelity(GateKind::Cnot, ClassicalFidelity::TruthTable, table)
}

/// The two complementary fidelities that bound the process fidelity:
/// `(F_zx, F_xz)` for the C-Phase, `(F_zz, F_xx)` for the C-NOT.
pub fn complementary_pair(gate: GateKind) -> [ClassicalFidelity; 2] {
    match gate {
        GateKind::Cphase => [ClassicalFidelity::Zx, ClassicalFidelity::Xz],
        GateKind::Cnot => [ClassicalFidelity::TruthTable, ClassicalFidelity::Xx],
    }
}

pub fn complementary_fidelities(gate: GateKind, table: &ConditionalTable) -> Result<(Estimate, Estimate)> {
    let [a, b] = complementary_pair(gate);
    Ok((classical_fidelity(gate, a, table)?, classical_fidelity(gate, b, table)?))
}

/// Circular-basis fidelity of the C-Phase on the four `X` inputs.
pub fn parallelism_fidelity(table: &ConditionalTable) -> Result<Estimate> {
    classical_fidelity(GateKind::Cphase, ClassicalFidelity::Parallelism, table)
}

/// One `P(output|input)` term of a fidelity sum.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub output: Pair,
    pub input: Pair,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({}|{})", pair_label(&self.output), pair_label(&self.input))
    }
}

const fn term(o: [NamedQubit; 2], i: [NamedQubit; 2]) -> Term {
    Term { output: o, input: i }
}

use NamedQubit::{Minus as M, Plus as P, L, R};

/// The circular-basis term list as printed with the experiment.
pub const PRINTED_PARALLELISM_TERMS: [Term; 8] = [
    term([R, R], [P, P]),
    term([L, L], [P, P]),
    term([R, L], [P, M]),
    term([L, R], [P, M]),
    term([R, L], [M, P]),
    term([L, R], [M, M]),
    term([R, R], [M, M]),
    term([L, L], [M, M]),
];

/// Printed versus oracle-derived term list of a fidelity sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermDiff {
    pub derived: Vec<String>,
    pub printed_only: Vec<String>,
    pub derived_only: Vec<String>,
}

impl TermDiff {
    pub fn agrees(&self) -> bool {
        self.printed_only.is_empty() && self.derived_only.is_empty()
    }
}

pub fn derived_terms(gate: GateKind, fid: ClassicalFidelity) -> Result<Vec<Term>> {
    let mut out = Vec::new();
    for input in fid.inputs() {
        for (o, _) in accepted_outcomes(gate, fid, input)? {
            out.push(term(o, input));
        }
    }
    Ok(out)
}

pub fn parallelism_term_diff() -> Result<TermDiff> {
    let derived = derived_terms(GateKind::Cphase, ClassicalFidelity::Parallelism)?;
    let printed = PRINTED_PARALLELISM_TERMS;
    Ok(TermDiff {
        derived: derived.iter().map(Term::to_string).collect(),
        printed_only: printed
            .iter()
            .filter(|t| !derived.contains(t))
            .map(Term::to_string)
            .collect(),
        derived_only: derived
            .iter()
            .filter(|t| !printed.contains(t))
            .map(Term::to_string)
            .collect(),
    })
}
