use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::fock::DEFAULT_MAX_PHOTONS;
use crate::protocols::PpbsParams;
use crate::{Error, Result};

pub const MAX_P2: f64 = 0.2;

/// Visibilities `V ∈ [0, 1]` at the two kinds of interference point.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overlaps {
    /// Between the photons that build the resource state.
    pub resource: f64,
    /// Between an input photon and the resource photon it is measured with.
    pub bsm: f64,
}

impl Default for Overlaps {
    fn default() -> Self {
        Overlaps {
            resource: 1.0,
            bsm: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseParams {
    /// Probability that a source emits a second pair in the same pulse.
    pub p2: f64,
    pub overlap: Overlaps,
    /// Measured `(T_H, T_V)` of the two input ports of the entangling
    /// PPBS; `None` for the ideal `(1, 1/3)`.
    pub ppbs_ports: Option<[PpbsParams; 2]>,
    /// Standard deviation (rad) of the slowly drifting interferometer phase.
    pub phase_drift: f64,
    /// Also apply the drift inside the single-photon analyzers.
    pub sagnac_drift: bool,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            p2: 0.0,
            overlap: Overlaps::default(),
            ppbs_ports: None,
            phase_drift: 0.0,
            sagnac_drift: false,
        }
    }
}

impl NoiseParams {
    pub fn ideal() -> Self {
        NoiseParams::default()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidParameter(format!("{what} = {v} out of range")));
        if !(0.0..=MAX_P2).contains(&self.p2) {
            return bad("p2", self.p2);
        }
        for (name, v) in [
            ("overlap.resource", self.overlap.resource),
            ("overlap.bsm", self.overlap.bsm),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(name, v);
            }
        }
        if let Some(ports) = &self.ppbs_ports {
            for p in ports {
                for t in [p.t_h, p.t_v] {
                    if !(0.0..=1.0).contains(&t) {
                        return bad("ppbs transmission", t);
                    }
                }
            }
        }
        if !(self.phase_drift >= 0.0 && self.phase_drift.is_finite()) {
            return bad("phase_drift", self.phase_drift);
        }
        Ok(())
    }

    /// The entangling PPBS as used by the simulation.
    pub fn main_ppbs(&self) -> PpbsParams {
        self.ppbs_ports
            .as_ref()
            .map(PpbsParams::averaged)
            .unwrap_or(PpbsParams::IDEAL)
    }

    /// `E[e^{iφ}] = e^{−σ²/2}` for the Gaussian drift.
    pub fn drift_coherence(&self) -> f64 {
        (-0.5 * self.phase_drift * self.phase_drift).exp()
    }

    /// True when only single-pair, fully indistinguishable events occur.
    pub fn photon_effects_free(&self) -> bool {
        self.p2 == 0.0 && self.overlap.bsm == 1.0
    }
}

/// Pairs emitted by each source in one pulse: the nominal pair, plus a
/// second one with probability `p2`.
pub fn sample_emission<R: Rng + ?Sized>(sources: usize, p2: f64, rng: &mut R) -> Vec<usize> {
    (0..sources)
        .map(|_| if p2 > 0.0 && rng.random::<f64>() < p2 { 2 } else { 1 })
        .collect()
}

/// One emission configuration and its probability.
#[derive(Clone, Debug, PartialEq)]
pub struct Emission {
    pub pairs: Vec<usize>,
    pub weight: f64,
}

/// Every configuration with at most `DEFAULT_MAX_PHOTONS` photons, and the
/// total weight of the ones dropped for exceeding it.
pub fn emission_configurations(photons_per_pair: &[usize], p2: f64) -> (Vec<Emission>, f64) {
    let n = photons_per_pair.len();
    let mut kept = Vec::new();
    let mut dropped = 0.0;
    for mask in 0..1usize << n {
        let pairs: Vec<usize> = (0..n).map(|s| 1 + ((mask >> s) & 1)).collect();
        let weight: f64 = pairs.iter().map(|&c| if c == 2 { p2 } else { 1.0 - p2 }).product();
        if weight == 0.0 {
            continue;
        }
        let photons: usize = pairs.iter().zip(photons_per_pair).map(|(c, p)| c * p).sum();
        if photons > DEFAULT_MAX_PHOTONS {
            dropped += weight;
        } else {
            kept.push(Emission { pairs, weight });
        }
    }
    (kept, dropped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_p2_is_nominal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(sample_emission(3, 0.0, &mut rng), vec![1, 1, 1]);
        }
        let (cfg, dropped) = emission_configurations(&[2, 2, 2], 0.0);
        assert_eq!(cfg.len(), 1);
        assert_eq!(dropped, 0.0);
    }

    #[test]
    fn double_fraction_is_bernoulli() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let doubles = (0..n).filter(|_| sample_emission(1, 0.05, &mut rng)[0] == 2).count() as f64;
        let sd = (0.05f64 * 0.95 / n as f64).sqrt();
        assert!((doubles / n as f64 - 0.05).abs() < 3.0 * sd);
    }

    #[test]
    fn truncation_accounting() {
        // three pair sources: two or more doubles exceed eight photons
        let (cfg, dropped) = emission_configurations(&[2, 2, 2], 0.1);
        assert_eq!(cfg.len(), 4);
        let kept: f64 = cfg.iter().map(|c| c.weight).sum();
        assert!((kept + dropped - 1.0).abs() < 1e-15);
        assert!((dropped - (3.0 * 0.01 * 0.9 + 0.001)).abs() < 1e-15);
        let (cfg, dropped) = emission_configurations(&[2, 2], 0.1);
        assert_eq!(cfg.len(), 4);
        assert_eq!(dropped, 0.0);
    }

    #[test]
    fn validation() {
        assert!(NoiseParams::ideal().validate().is_ok());
        let mut p = NoiseParams::ideal();
        p.p2 = 0.3;
        assert!(p.validate().is_err());
        p.p2 = 0.0;
        p.overlap.bsm = 1.1;
        assert!(p.validate().is_err());
    }
}
