use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::label::QubitLabel;
use crate::{Error, Result, C64};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> DMatrix<C64> {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let entries = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        };
        DMatrix::from_row_slice(2, 2, &entries)
    }

    /// `self · other` as a phase times a Pauli.
    pub fn product(self, other: Pauli) -> (Phase, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (Phase::ONE, p),
            (a, b) if a == b => (Phase::ONE, I),
            (X, Y) => (Phase::I, Z),
            (Y, Z) => (Phase::I, X),
            (Z, X) => (Phase::I, Y),
            (Y, X) => (Phase::MINUS_I, Z),
            (Z, Y) => (Phase::MINUS_I, X),
            (X, Z) => (Phase::MINUS_I, Y),
            _ => unreachable!(),
        }
    }

    pub fn commutes_with(self, other: Pauli) -> bool {
        self == Pauli::I || other == Pauli::I || self == other
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Global phase `i^k`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u8) -> Self {
        Phase(k % 4)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn value(self) -> C64 {
        match self.0 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    fn prefix(self) -> &'static str {
        match self.0 {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// Tensor product of single-qubit Paulis on labelled qubits with a phase in
/// `{±1, ±i}`. Identity factors are not stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: Phase,
    factors: BTreeMap<QubitLabel, Pauli>,
}

impl PauliString {
    pub fn identity() -> Self {
        PauliString {
            phase: Phase::ONE,
            factors: BTreeMap::new(),
        }
    }

    pub fn single(label: impl Into<QubitLabel>, p: Pauli) -> Self {
        let mut s = PauliString::identity();
        if p != Pauli::I {
            s.factors.insert(label.into(), p);
        }
        s
    }

    pub fn from_factors<I, L>(phase: Phase, factors: I) -> Self
    where
        I: IntoIterator<Item = (L, Pauli)>,
        L: Into<QubitLabel>,
    {
        factors
            .into_iter()
            .fold(PauliString::identity().with_phase(phase), |acc, (l, p)| {
                acc * PauliString::single(l, p)
            })
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn factor(&self, label: &QubitLabel) -> Pauli {
        self.factors.get(label).copied().unwrap_or(Pauli::I)
    }

    pub fn factors(&self) -> impl Iterator<Item = (&QubitLabel, Pauli)> {
        self.factors.iter().map(|(l, p)| (l, *p))
    }

    pub fn support(&self) -> Vec<QubitLabel> {
        self.factors.keys().cloned().collect()
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// True when the operator is Hermitian (phase ±1).
    pub fn is_hermitian(&self) -> bool {
        self.phase.0.is_multiple_of(2)
    }

    /// The same operator with its phase stripped.
    pub fn unphased(&self) -> PauliString {
        self.clone().with_phase(Phase::ONE)
    }

    pub fn eq_up_to_phase(&self, other: &PauliString) -> bool {
        self.factors == other.factors
    }

    pub fn adjoint(&self) -> PauliString {
        self.clone().with_phase(self.phase.conj())
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anticommuting = self
            .factors
            .iter()
            .filter(|(l, p)| !p.commutes_with(other.factor(l)))
            .count();
        anticommuting % 2 == 0
    }

    /// Dense matrix on `register` (big-endian, first label most significant).
    pub fn matrix_on(&self, register: &[QubitLabel]) -> Result<DMatrix<C64>> {
        for l in self.factors.keys() {
            if !register.contains(l) {
                return Err(Error::UnknownLabel(l.to_string()));
            }
        }
        let mut m = DMatrix::from_element(1, 1, self.phase.value());
        for l in register {
            m = m.kronecker(&self.factor(l).matrix());
        }
        Ok(m)
    }

    /// Parse a whitespace-separated product such as `"-i X4' Z6'"` or
    /// `"iY4' Z6'"`; factors are multiplied left to right.
    pub fn parse(text: &str) -> Result<PauliString> {
        let mut acc = PauliString::identity();
        for token in text.split_whitespace() {
            acc = acc * parse_token(token)?;
        }
        Ok(acc)
    }
}

fn parse_token(token: &str) -> Result<PauliString> {
    let mut rest = token;
    let mut phase = Phase::ONE;
    if let Some(r) = rest.strip_prefix('-') {
        phase = phase * Phase::MINUS_ONE;
        rest = r;
    }
    if let Some(r) = rest.strip_prefix('i') {
        phase = phase * Phase::I;
        rest = r;
    }
    let mut chars = rest.chars();
    let Some(letter) = chars.next() else {
        // a bare phase such as `-i`
        return Ok(PauliString::identity().with_phase(phase));
    };
    let label: String = chars.collect();
    let p = match letter {
        'I' => Pauli::I,
        'X' => Pauli::X,
        'Y' => Pauli::Y,
        'Z' => Pauli::Z,
        _ => return Err(Error::Parse(format!("bad Pauli token `{token}`"))),
    };
    if p != Pauli::I && label.is_empty() {
        return Err(Error::Parse(format!("Pauli token `{token}` has no qubit label")));
    }
    Ok(PauliString::single(label, p).with_phase(phase))
}

impl Mul for PauliString {
    type Output = PauliString;
    fn mul(self, rhs: PauliString) -> PauliString {
        &self * &rhs
    }
}

impl Mul for &PauliString {
    type Output = PauliString;
    fn mul(self, rhs: &PauliString) -> PauliString {
        let mut phase = self.phase * rhs.phase;
        let mut factors = self.factors.clone();
        for (l, q) in &rhs.factors {
            let p = factors.get(l).copied().unwrap_or(Pauli::I);
            let (ph, r) = p.product(*q);
            phase = phase * ph;
            if r == Pauli::I {
                factors.remove(l);
            } else {
                factors.insert(l.clone(), r);
            }
        }
        PauliString { phase, factors }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.phase.prefix())?;
        if self.factors.is_empty() {
            return f.write_str("I");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(l, p)| format!("{}{}", p.letter(), l))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        PauliString::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels() -> Vec<QubitLabel> {
        vec!["a".into(), "b".into()]
    }

    fn all_two_qubit() -> Vec<PauliString> {
        let mut out = Vec::new();
        for ph in 0..4 {
            for p in Pauli::ALL {
                for q in Pauli::ALL {
                    out.push(PauliString::from_factors(Phase::from_power(ph), [("a", p), ("b", q)]));
                }
            }
        }
        out
    }

    #[test]
    fn single_qubit_table() {
        assert_eq!(Pauli::X.product(Pauli::Y), (Phase::I, Pauli::Z));
        assert_eq!(Pauli::X.product(Pauli::Z), (Phase::MINUS_I, Pauli::Y));
        assert_eq!(Pauli::Y.product(Pauli::Y), (Phase::ONE, Pauli::I));
    }

    #[test]
    fn product_matches_matrices_exhaustively() {
        let reg = labels();
        let all = all_two_qubit();
        for a in &all {
            for b in &all {
                let ab = a * b;
                let lhs = ab.matrix_on(&reg).unwrap();
                let rhs = a.matrix_on(&reg).unwrap() * b.matrix_on(&reg).unwrap();
                assert!((lhs - rhs).norm() < 1e-12, "{a} * {b}");
            }
        }
    }

    #[test]
    fn parse_roundtrip_and_products() {
        let p = PauliString::parse("-i X4' Y6'").unwrap();
        assert_eq!(p.phase(), Phase::MINUS_I);
        assert_eq!(p.factor(&"4'".into()), Pauli::X);
        assert_eq!(PauliString::parse(&p.to_string()).unwrap(), p);
        // X·Z on the same qubit = -iY
        let xz = PauliString::parse("X4 Z4").unwrap();
        assert_eq!(xz, PauliString::single("4", Pauli::Y).with_phase(Phase::MINUS_I));
        assert!(PauliString::parse("Z6 Z6").unwrap().is_identity());
        assert!(PauliString::parse("Q1").is_err());
    }

    #[test]
    fn commutation() {
        let xx = PauliString::parse("Xa Xb").unwrap();
        let zz = PauliString::parse("Za Zb").unwrap();
        let zi = PauliString::parse("Za").unwrap();
        assert!(xx.commutes_with(&zz));
        assert!(!xx.commutes_with(&zi));
    }
}
