use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Name of one qubit in a register, e.g. `"1"`, `"4'"` or `"6''"`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitLabel(String);

impl QubitLabel {
    pub fn new(name: impl Into<String>) -> Self {
        QubitLabel(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for QubitLabel {
    fn from(s: &str) -> Self {
        QubitLabel(s.to_string())
    }
}

impl From<String> for QubitLabel {
    fn from(s: String) -> Self {
        QubitLabel(s)
    }
}

/// Build a register from string-like labels.
pub fn register<I, L>(labels: I) -> Vec<QubitLabel>
where
    I: IntoIterator<Item = L>,
    L: Into<QubitLabel>,
{
    labels.into_iter().map(Into::into).collect()
}

pub(crate) fn check_unique(labels: &[QubitLabel]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateLabel(l.to_string()));
        }
    }
    Ok(())
}

pub(crate) fn position(labels: &[QubitLabel], label: &QubitLabel) -> Result<usize> {
    labels
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| Error::UnknownLabel(label.to_string()))
}

pub(crate) fn positions(labels: &[QubitLabel], wanted: &[QubitLabel]) -> Result<Vec<usize>> {
    check_unique(wanted)?;
    wanted.iter().map(|w| position(labels, w)).collect()
}

/// `perm[k]` = position in `from` of `to[k]`; both must hold the same labels.
pub(crate) fn permutation(from: &[QubitLabel], to: &[QubitLabel]) -> Result<Vec<usize>> {
    if from.len() != to.len() {
        return Err(Error::RegisterMismatch(format!(
            "{} vs {} qubits",
            from.len(),
            to.len()
        )));
    }
    check_unique(to)?;
    to.iter()
        .map(|l| {
            from.iter()
                .position(|f| f == l)
                .ok_or_else(|| Error::RegisterMismatch(format!("label `{l}` missing")))
        })
        .collect()
}
