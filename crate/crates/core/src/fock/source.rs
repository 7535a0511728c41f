use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::mode::{ModeRegistry, Polarization, MAX_INTERNAL};
use super::state::{CreationPoly, FockState};
use crate::qubit::{BellKind, NamedQubit};
use crate::{Error, Result, C64};

/// Default cap on the number of photons in one emission configuration.
pub const DEFAULT_MAX_PHOTONS: usize = 8;

/// Real decomposition of a photon's wavepacket over internal modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wavepacket {
    pub components: Vec<(u8, f64)>,
}

impl Default for Wavepacket {
    fn default() -> Self {
        Wavepacket::common()
    }
}

impl Wavepacket {
    /// Entirely in the shared internal mode 0.
    pub fn common() -> Self {
        Wavepacket {
            components: vec![(0, 1.0)],
        }
    }

    /// `√v·e₀ + √(1−v)·e_k`.
    pub fn with_overlap(v: f64, orthogonal: u8) -> Result<Self> {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!("overlap {v} outside [0, 1]")));
        }
        if orthogonal == 0 || orthogonal >= MAX_INTERNAL {
            return Err(Error::InvalidParameter(format!(
                "orthogonal internal index {orthogonal} out of range"
            )));
        }
        let mut components = vec![(0, v.sqrt())];
        if v < 1.0 {
            components.push((orthogonal, (1.0 - v).sqrt()));
        }
        Ok(Wavepacket { components })
    }

    /// Amplitude overlap `⟨self|other⟩`.
    pub fn overlap(&self, other: &Wavepacket) -> f64 {
        self.components
            .iter()
            .map(|(k, c)| {
                other
                    .components
                    .iter()
                    .filter(|(j, _)| j == k)
                    .map(|(_, d)| c * d)
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn internal_modes(&self) -> u8 {
        self.components.iter().map(|(k, _)| k + 1).max().unwrap_or(1)
    }
}

/// A one- or two-photon polarization source. `amplitudes` are indexed
/// big-endian by the polarization bits of `paths` (`H = 0`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Source {
    pub paths: Vec<String>,
    pub amplitudes: Vec<C64>,
    #[serde(default)]
    pub wavepacket: Wavepacket,
}

impl Source {
    pub fn bell(kind: BellKind, a: &str, b: &str) -> Self {
        Source {
            paths: vec![a.into(), b.into()],
            amplitudes: kind.amplitudes().to_vec(),
            wavepacket: Wavepacket::common(),
        }
    }

    pub fn single(path: &str, q: NamedQubit) -> Self {
        Source {
            paths: vec![path.into()],
            amplitudes: q.amplitudes().to_vec(),
            wavepacket: Wavepacket::common(),
        }
    }

    pub fn product(a: &str, qa: NamedQubit, b: &str, qb: NamedQubit) -> Self {
        let (x, y) = (qa.amplitudes(), qb.amplitudes());
        Source {
            paths: vec![a.into(), b.into()],
            amplitudes: vec![x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]],
            wavepacket: Wavepacket::common(),
        }
    }

    pub fn photons(&self) -> usize {
        self.paths.len()
    }

    fn validate(&self) -> Result<()> {
        if self.paths.is_empty() || self.amplitudes.len() != 1 << self.paths.len() {
            return Err(Error::Dimension {
                expected: 1 << self.paths.len(),
                got: self.amplitudes.len(),
            });
        }
        let n: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(n));
        }
        Ok(())
    }

    /// Creation operator of one emission event on `reg`.
    pub fn creation(&self, reg: &ModeRegistry) -> Result<CreationPoly> {
        self.validate()?;
        let np = self.paths.len();
        let mut total = CreationPoly::default();
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            if amp.norm() == 0.0 {
                continue;
            }
            let mut term = CreationPoly::one().scaled(*amp);
            for (j, path) in self.paths.iter().enumerate() {
                let pol = Polarization::from_bit((idx >> (np - 1 - j)) as u8);
                let mut parts = Vec::new();
                for &(k, c) in &self.wavepacket.components {
                    parts.push((reg.mode_index(path, pol, k)?, C64::new(c, 0.0)));
                }
                term = term.mul(&CreationPoly::linear(parts));
            }
            total = total.add(&term);
        }
        Ok(total)
    }
}

/// The set of sources feeding one optical network.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    pub sources: Vec<Source>,
}

impl SourceConfig {
    pub fn new(sources: Vec<Source>) -> Self {
        SourceConfig { sources }
    }

    /// Give `other`'s photons overlap `v` with those of `reference`.
    ///
    /// `reference` keeps (or is reset to) the common mode and `other` gets a
    /// fresh orthogonal internal component, so the two-photon interference
    /// visibility between them is `v`.
    pub fn set_internal_overlap(&mut self, reference: usize, other: usize, v: f64) -> Result<()> {
        if reference == other || reference >= self.sources.len() || other >= self.sources.len() {
            return Err(Error::InvalidParameter(format!(
                "bad source pairing ({reference}, {other})"
            )));
        }
        let used: Vec<u8> = self
            .sources
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != other)
            .flat_map(|(_, s)| s.wavepacket.components.iter().map(|(k, _)| *k))
            .collect();
        let k = (1..MAX_INTERNAL)
            .find(|k| !used.contains(k))
            .ok_or_else(|| Error::InvalidParameter("no free internal mode left".into()))?;
        if self.sources[reference]
            .wavepacket
            .components
            .iter()
            .any(|(j, _)| *j != 0)
        {
            return Err(Error::InvalidParameter(format!(
                "reference source {reference} is not in the common mode"
            )));
        }
        self.sources[other].wavepacket = Wavepacket::with_overlap(v, k)?;
        Ok(())
    }

    pub fn internal_modes(&self) -> u8 {
        self.sources
            .iter()
            .map(|s| s.wavepacket.internal_modes())
            .max()
            .unwrap_or(1)
    }

    /// Normalized state with source `s` firing `counts[s]` times.
    pub fn emit(&self, reg: &Arc<ModeRegistry>, counts: &[usize]) -> Result<FockState> {
        if counts.len() != self.sources.len() {
            return Err(Error::Dimension {
                expected: self.sources.len(),
                got: counts.len(),
            });
        }
        let photons: usize = counts.iter().zip(&self.sources).map(|(c, s)| c * s.photons()).sum();
        if photons > DEFAULT_MAX_PHOTONS {
            return Err(Error::InvalidParameter(format!(
                "{photons} photons exceed the maximum of {DEFAULT_MAX_PHOTONS}"
            )));
        }
        let mut poly = CreationPoly::one();
        for (s, &c) in self.sources.iter().zip(counts) {
            if c > 0 {
                poly = poly.mul(&s.creation(reg)?.pow(c));
            }
        }
        Ok(FockState::vacuum(reg.clone()).create(&poly).normalized()?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_bounds() {
        assert!(Wavepacket::with_overlap(1.2, 1).is_err());
        assert!(Wavepacket::with_overlap(-0.1, 1).is_err());
        let w = Wavepacket::with_overlap(0.9, 1).unwrap();
        assert!((w.overlap(&Wavepacket::common()).powi(2) - 0.9).abs() < 1e-15);
        assert!((w.overlap(&w) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_source_emits_bell_pair() {
        let reg = Arc::new(ModeRegistry::new(["3", "4"], 1).unwrap());
        let cfg = SourceConfig::new(vec![Source::bell(BellKind::PhiPlus, "3", "4")]);
        let s = cfg.emit(&reg, &[1]).unwrap();
        let h3 = reg.mode_index("3", Polarization::H, 0).unwrap();
        let h4 = reg.mode_index("4", Polarization::H, 0).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.amplitude(&[h3, h4]).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        // a double pair is four photons, still normalized
        let d = cfg.emit(&reg, &[2]).unwrap();
        assert_eq!(d.photon_numbers().into_iter().collect::<Vec<_>>(), vec![4]);
        assert!((d.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pairing_assigns_fresh_modes() {
        let mut cfg = SourceConfig::new(vec![
            Source::bell(BellKind::PhiPlus, "a", "b"),
            Source::bell(BellKind::PhiPlus, "c", "d"),
            Source::single("e", NamedQubit::H),
        ]);
        cfg.set_internal_overlap(0, 1, 0.9).unwrap();
        cfg.set_internal_overlap(0, 2, 0.8).unwrap();
        assert_eq!(cfg.internal_modes(), 3);
        assert!(cfg.set_internal_overlap(0, 0, 0.5).is_err());
        assert!(cfg.set_internal_overlap(0, 1, 1.5).is_err());
    }
}
