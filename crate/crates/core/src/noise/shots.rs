use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::sample_emission;
use super::photon::{Harmonics, Record};
use crate::metrics::Estimate;
use crate::{Error, Result};

/// Outcome of a single shot.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Shot {
    Accepted(usize),
    Rejected,
    /// Emission configuration above the photon cap; counted as rejected.
    Truncated,
}

/// Per-shot generator for shot index `i`: an independent ChaCha stream, so
/// results do not depend on how the shots are split across threads.
pub fn shot_rng(seed: u64, key: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ key.rotate_left(29) ^ 0x9e37_79b9_7f4a_7c15);
    rng.set_stream(i);
    rng
}

/// Stable 64-bit key for a byte string (FNV-1a).
pub fn stream_key(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ *b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Run `shots` independent shots of `f` in parallel and tally them.
pub fn tally<F>(outcomes: usize, shots: u64, seed: u64, key: u64, f: F) -> (Vec<u64>, u64, u64)
where
    F: Fn(&mut ChaCha8Rng) -> Shot + Sync,
{
    let zero = || (vec![0u64; outcomes], 0u64, 0u64);
    (0..shots)
        .into_par_iter()
        .fold(zero, |mut acc, i| {
            match f(&mut shot_rng(seed, key, i)) {
                Shot::Accepted(k) => acc.0[k] += 1,
                Shot::Rejected => acc.1 += 1,
                Shot::Truncated => acc.2 += 1,
            }
            acc
        })
        .reduce(zero, |mut a, b| {
            for (x, y) in a.0.iter_mut().zip(b.0) {
                *x += y;
            }
            (a.0, a.1 + b.1, a.2 + b.2)
        })
}

/// Draw an index from `probs` (sub-normalized; the remainder rejects).
pub fn draw<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> Shot {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return Shot::Accepted(i);
        }
    }
    Shot::Rejected
}

/// Coincidence counts of a sampled run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotResult {
    pub records: Vec<(Record, u64)>,
    pub shots: u64,
    pub accepted: u64,
    pub truncated: u64,
}

impl ShotResult {
    pub fn acceptance(&self) -> Estimate {
        Estimate::binomial(self.accepted, self.shots)
    }

    pub fn count(&self, rec: &Record) -> u64 {
        self.records
            .iter()
            .find(|(r, _)| r == rec)
            .map(|(_, c)| *c)
            .unwrap_or(0)
    }

    /// `P(bits | accepted)` indexed by `2·b₁ + b₂`, with binomial errors.
    pub fn conditional_bits(&self) -> Result<[Estimate; 4]> {
        if self.accepted == 0 {
            return Err(Error::ZeroAcceptance);
        }
        let mut k = [0u64; 4];
        for (r, c) in &self.records {
            k[(2 * r.bits[0] + r.bits[1]) as usize] += c;
        }
        Ok(k.map(|k| Estimate::binomial(k, self.accepted)))
    }
}

/// Sample the photon model: per shot, draw the emission configuration and
/// the drift phases, then one detection record or a rejection.
pub fn run_shots(h: &Harmonics, p2: f64, sigma: f64, shots: u64, seed: u64) -> Result<ShotResult> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let key = stream_key(
        format!(
            "{}:{}",
            h.gate.name(),
            serde_json::to_string(&h.setting).expect("setting serializes")
        )
        .as_bytes(),
    );
    let sources = h.configs.first().map(|c| c.pairs.len()).unwrap_or(0);
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    // fixed-phase probabilities are shot independent without drift
    let frozen: Option<Vec<Vec<f64>>> = (sigma == 0.0 || h.arms == 0).then(|| {
        (0..h.configs.len())
            .map(|c| h.probabilities_at(c, &vec![0.0; h.arms]))
            .collect()
    });
    let (counts, _, truncated) = tally(h.records.len(), shots, seed, key, |rng| {
        let pairs = sample_emission(sources, p2, rng);
        let Some(c) = h.configs.iter().position(|c| c.pairs == pairs) else {
            return Shot::Truncated;
        };
        match &frozen {
            Some(p) => draw(&p[c], rng),
            None => {
                let phases: Vec<f64> = (0..h.arms).map(|_| normal.sample(rng)).collect();
                draw(&h.probabilities_at(c, &phases), rng)
            }
        }
    });
    let accepted = counts.iter().sum();
    Ok(ShotResult {
        records: h.records.iter().copied().zip(counts).collect(),
        shots,
        accepted,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_is_partition_independent() {
        let probs = [0.1, 0.2, 0.3];
        let f = |rng: &mut ChaCha8Rng| draw(&probs, rng);
        let a = tally(3, 10_000, 5, 1, f);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| tally(3, 10_000, 5, 1, f));
        assert_eq!(a, b);
        let c = tally(3, 10_000, 6, 1, f);
        assert_ne!(a, c);
    }

    #[test]
    fn draw_frequencies() {
        let probs = [0.25, 0.5];
        let n = 200_000u64;
        let (k, rej, _) = tally(2, n, 11, 0, |rng| draw(&probs, rng));
        for (i, p) in probs.iter().enumerate() {
            let sd = (p * (1.0 - p) / n as f64).sqrt();
            assert!((k[i] as f64 / n as f64 - p).abs() < 3.0 * sd);
        }
        assert_eq!(k.iter().sum::<u64>() + rej, n);
    }
}
