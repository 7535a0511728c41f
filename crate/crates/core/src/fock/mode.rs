use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Upper bound on orthogonal internal (temporal/spectral) modes per
/// path and polarization.
pub const MAX_INTERNAL: u8 = 3;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];

    pub fn bit(self) -> u8 {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Self {
        if bit & 1 == 0 {
            Polarization::H
        } else {
            Polarization::V
        }
    }
}

/// One bosonic mode: a spatial path, a polarization and an internal index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeId {
    pub path: String,
    pub pol: Polarization,
    pub internal: u8,
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}", self.path, self.pol)?;
        if self.internal > 0 {
            write!(f, "#{}", self.internal)?;
        }
        Ok(())
    }
}

/// Fixed set of modes: every registered path carries both polarizations and
/// `internal` orthogonal internal modes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeRegistry {
    paths: Vec<String>,
    index: HashMap<String, usize>,
    internal: u8,
}

impl ModeRegistry {
    pub fn new<I, S>(paths: I, internal: u8) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        if internal == 0 || internal > MAX_INTERNAL {
            return Err(Error::InvalidParameter(format!(
                "internal mode count must be in 1..={MAX_INTERNAL}, got {internal}"
            )));
        }
        let paths: Vec<String> = paths.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, p) in paths.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::InvalidParameter(format!("path `{p}` registered twice")));
            }
        }
        Ok(ModeRegistry { paths, index, internal })
    }

    pub fn paths(&self) -> &[String] {
        &self.paths
    }

    pub fn internal_count(&self) -> u8 {
        self.internal
    }

    pub fn len(&self) -> usize {
        self.paths.len() * 2 * self.internal as usize
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn path_index(&self, path: &str) -> Result<usize> {
        self.index
            .get(path)
            .copied()
            .ok_or_else(|| Error::UnknownPath(path.to_string()))
    }

    pub fn has_path(&self, path: &str) -> bool {
        self.index.contains_key(path)
    }

    pub fn mode_index(&self, path: &str, pol: Polarization, internal: u8) -> Result<u16> {
        if internal >= self.internal {
            return Err(Error::InvalidParameter(format!(
                "internal index {internal} exceeds registry maximum {}",
                self.internal
            )));
        }
        let p = self.path_index(path)?;
        Ok(self.raw_index(p, pol, internal))
    }

    pub(crate) fn raw_index(&self, path: usize, pol: Polarization, internal: u8) -> u16 {
        ((path * 2 + pol.bit() as usize) * self.internal as usize + internal as usize) as u16
    }

    /// (path index, polarization, internal) of a raw mode index.
    pub(crate) fn decompose(&self, mode: u16) -> (usize, Polarization, u8) {
        let m = mode as usize;
        let internal = (m % self.internal as usize) as u8;
        let rest = m / self.internal as usize;
        (rest / 2, Polarization::from_bit((rest % 2) as u8), internal)
    }

    pub fn mode(&self, mode: u16) -> ModeId {
        let (p, pol, internal) = self.decompose(mode);
        ModeId {
            path: self.paths[p].clone(),
            pol,
            internal,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_roundtrip() {
        let reg = ModeRegistry::new(["3", "4", "4'"], 3).unwrap();
        assert_eq!(reg.len(), 18);
        for m in 0..reg.len() as u16 {
            let id = reg.mode(m);
            assert_eq!(reg.mode_index(&id.path, id.pol, id.internal).unwrap(), m);
        }
    }

    #[test]
    fn rejects_bad_registries() {
        assert!(ModeRegistry::new(["a", "a"], 1).is_err());
        assert!(ModeRegistry::new(["a"], 0).is_err());
        assert!(ModeRegistry::new(["a"], 4).is_err());
        let reg = ModeRegistry::new(["a"], 1).unwrap();
        assert!(matches!(
            reg.mode_index("b", Polarization::H, 0),
            Err(Error::UnknownPath(_))
        ));
        assert!(reg.mode_index("a", Polarization::H, 1).is_err());
    }
}
