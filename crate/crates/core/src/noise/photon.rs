use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::{emission_configurations, NoiseParams};
use crate::fock::{FockState, ModeRegistry, OpticalElement, Photons, Polarization, Source, SourceConfig};
use crate::protocols::{
    cluster_elements, lambda_elements, partial_bsm_elements, partial_readout, rail_split_elements, sagnac_bsm_elements,
    sagnac_readout, BsmMode, BsmOutcome, ClusterPrep, GateKind, PpbsParams,
};
use crate::qubit::{Basis, BellKind, NamedQubit};
use crate::{Error, Result, C64};

/// One analysis setting: product input and the measurement basis of each
/// output qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Setting {
    /// Polarization amplitudes `(H, V)` of input 1 and input 2.
    pub inputs: [[C64; 2]; 2],
    pub bases: [Basis; 2],
}

impl Setting {
    pub fn named(a: NamedQubit, b: NamedQubit, bases: [Basis; 2]) -> Self {
        Setting {
            inputs: [a.amplitudes(), b.amplitudes()],
            bases,
        }
    }

    fn validate(&self) -> Result<()> {
        for q in &self.inputs {
            let n = q[0].norm_sqr() + q[1].norm_sqr();
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::NotNormalized(n));
            }
        }
        Ok(())
    }
}

/// Heralded outcome of one accepted event, after software corrections.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Record {
    pub bsm: [BsmOutcome; 2],
    /// Output bits in the setting's bases, output 1 first.
    pub bits: [u8; 2],
}

/// Every record heralded by analyzers in `mode`, sorted.
pub fn gate_records(mode: BsmMode) -> Vec<Record> {
    let kinds: Vec<BellKind> = BellKind::ALL
        .into_iter()
        .filter(|k| mode == BsmMode::Complete || k.is_phi())
        .collect();
    let mut out = Vec::new();
    for &a in &kinds {
        for &b in &kinds {
            for bits in 0..4u8 {
                out.push(Record {
                    bsm: [BsmOutcome::Bell(a), BsmOutcome::Bell(b)],
                    bits: [bits >> 1, bits & 1],
                });
            }
        }
    }
    out.sort();
    out
}

/// Polarization analyzer mapping the basis eigenstate of bit `b` to H
/// (`b = 0`) or V (`b = 1`).
pub fn analyzer(path: &str, basis: Basis) -> OpticalElement {
    let row = |b: u8| basis.eigenstate(b).amplitudes().map(|a| a.conj());
    OpticalElement::Jones {
        path: path.into(),
        matrix: [row(0), row(1)],
    }
}

/// Wave plate setting that turns H into `q`.
pub fn preparation(path: &str, q: [C64; 2]) -> OpticalElement {
    OpticalElement::Jones {
        path: path.into(),
        matrix: [[q[0], -q[1].conj()], [q[1], q[0].conj()]],
    }
}

#[derive(Clone, Debug)]
enum Readout {
    /// Stations `1, 3, 2, 5, 4, 6`, two detectors each.
    Cnot,
    /// Stations: photon 3 and photon 5 with four detectors `(rail, pol)`,
    /// then `4'` and `6'`.
    Cphase,
}

/// The optical network of one gate for one setting.
#[derive(Clone, Debug)]
struct Experiment {
    reg: Arc<ModeRegistry>,
    sources: SourceConfig,
    pre: Vec<OpticalElement>,
    arms: Vec<Vec<u16>>,
    post: Vec<OpticalElement>,
    /// `owner[mode] = (station, detector)`; `None` for undetected modes.
    owner: Vec<Option<(u8, u8)>>,
    stations: usize,
    readout: Readout,
}

const CNOT_PATHS: [&str; 8] = ["1", "2", "3", "4", "5", "6", "4L", "6L"];
const CPHASE_PATHS: [&str; 6] = ["3", "4'", "5", "6'", "3V'", "5V'"];

fn overlaps(cfg: &mut SourceConfig, pairs: &[(usize, usize, f64)]) -> Result<()> {
    for &(r, o, v) in pairs {
        if v < 1.0 {
            cfg.set_internal_overlap(r, o, v)?;
        }
    }
    Ok(())
}

impl Experiment {
    fn build(gate: GateKind, noise: &NoiseParams, setting: &Setting) -> Result<Self> {
        setting.validate()?;
        let [q1, q2] = setting.inputs;
        let drift = noise.phase_drift > 0.0;
        match gate {
            GateKind::Cnot => {
                let mut sources = SourceConfig::new(vec![
                    Source {
                        paths: vec!["1".into(), "2".into()],
                        amplitudes: vec![q1[0] * q2[0], q1[0] * q2[1], q1[1] * q2[0], q1[1] * q2[1]],
                        wavepacket: Default::default(),
                    },
                    Source::bell(BellKind::PhiPlus, "3", "4"),
                    Source::bell(BellKind::PhiPlus, "5", "6"),
                ]);
                overlaps(
                    &mut sources,
                    &[(1, 2, noise.overlap.resource), (1, 0, noise.overlap.bsm)],
                )?;
                let reg = Arc::new(ModeRegistry::new(CNOT_PATHS, sources.internal_modes())?);
                let arm_ports: &[(&str, Option<Polarization>)] = if drift {
                    &[("1", Some(Polarization::V)), ("2", Some(Polarization::V))]
                } else {
                    &[]
                };
                let mut post = cluster_elements(&ClusterPrep {
                    main: noise.main_ppbs(),
                    balance: PpbsParams::BALANCE,
                    overlap: 1.0,
                    wave_plates: true,
                });
                post.extend(partial_bsm_elements("1", "3"));
                post.extend(partial_bsm_elements("2", "5"));
                post.push(analyzer("4", setting.bases[0]));
                post.push(analyzer("6", setting.bases[1]));
                let stations: Vec<Vec<(&str, Polarization)>> = ["1", "3", "2", "5", "4", "6"]
                    .iter()
                    .map(|p| Polarization::BOTH.iter().map(|&pol| (*p, pol)).collect())
                    .collect();
                Self::assemble(reg, sources, vec![], arm_ports, post, &stations, Readout::Cnot)
            }
            GateKind::Cphase => {
                let mut sources = SourceConfig::new(vec![
                    Source::bell(BellKind::PhiPlus, "3", "6'"),
                    Source::product("4'", NamedQubit::Plus, "5", NamedQubit::Plus),
                ]);
                overlaps(&mut sources, &[(0, 1, noise.overlap.resource)])?;
                let reg = Arc::new(ModeRegistry::new(CPHASE_PATHS, sources.internal_modes())?);
                let mut pre = lambda_elements();
                pre.extend(rail_split_elements("3", "3V'"));
                pre.extend(rail_split_elements("5", "5V'"));
                for (rails, q) in [(["3", "3V'"], q1), (["5", "5V'"], q2)] {
                    for r in rails {
                        pre.push(preparation(r, q));
                    }
                }
                let arm_ports: &[(&str, Option<Polarization>)] = if drift && noise.sagnac_drift {
                    &[("3V'", None), ("5V'", None)]
                } else {
                    &[]
                };
                let mut post = sagnac_bsm_elements("3", "3V'");
                post.extend(sagnac_bsm_elements("5", "5V'"));
                post.push(analyzer("4'", setting.bases[0]));
                post.push(analyzer("6'", setting.bases[1]));
                let photon = |r0: &'static str, r1: &'static str| {
                    vec![
                        (r0, Polarization::H),
                        (r0, Polarization::V),
                        (r1, Polarization::H),
                        (r1, Polarization::V),
                    ]
                };
                let stations = vec![
                    photon("3", "3V'"),
                    photon("5", "5V'"),
                    vec![("4'", Polarization::H), ("4'", Polarization::V)],
                    vec![("6'", Polarization::H), ("6'", Polarization::V)],
                ];
                Self::assemble(reg, sources, pre, arm_ports, post, &stations, Readout::Cphase)
            }
        }
    }

    fn assemble(
        reg: Arc<ModeRegistry>,
        sources: SourceConfig,
        pre: Vec<OpticalElement>,
        arm_ports: &[(&str, Option<Polarization>)],
        post: Vec<OpticalElement>,
        stations: &[Vec<(&str, Polarization)>],
        readout: Readout,
    ) -> Result<Self> {
        let k_max = reg.internal_count();
        let modes_of = |path: &str, pols: &[Polarization]| -> Result<Vec<u16>> {
            let mut v = Vec::new();
            for &pol in pols {
                for k in 0..k_max {
                    v.push(reg.mode_index(path, pol, k)?);
                }
            }
            Ok(v)
        };
        let arms = arm_ports
            .iter()
            .map(|(p, pol)| modes_of(p, pol.as_ref().map(std::slice::from_ref).unwrap_or(&Polarization::BOTH)))
            .collect::<Result<_>>()?;
        let mut owner = vec![None; reg.len()];
        for (s, dets) in stations.iter().enumerate() {
            for (d, (path, pol)) in dets.iter().enumerate() {
                for m in modes_of(path, &[*pol])? {
                    owner[m as usize] = Some((s as u8, d as u8));
                }
            }
        }
        Ok(Experiment {
            reg,
            sources,
            pre,
            arms,
            post,
            owner,
            stations: stations.len(),
            readout,
        })
    }

    /// Clicked detector of every station, if each has exactly one.
    fn stations_fired(&self, key: &[u16]) -> Option<Vec<u8>> {
        let mut masks = vec![0u8; self.stations];
        for &m in key {
            if let Some((s, d)) = self.owner[m as usize] {
                masks[s as usize] |= 1 << d;
            }
        }
        masks
            .into_iter()
            .map(|m| (m.count_ones() == 1).then(|| m.trailing_zeros() as u8))
            .collect()
    }

    fn raw_record(&self, det: &[u8]) -> Record {
        match self.readout {
            Readout::Cnot => {
                let pol = |d: u8| Polarization::from_bit(d);
                Record {
                    bsm: [
                        BsmOutcome::Bell(partial_readout(pol(det[0]), pol(det[1]))),
                        BsmOutcome::Bell(partial_readout(pol(det[2]), pol(det[3]))),
                    ],
                    bits: [det[4], det[5]],
                }
            }
            Readout::Cphase => {
                let bell = |d: u8| {
                    let (rail, pol) = ((d >> 1) as usize, Polarization::from_bit(d & 1));
                    BellKind::ALL
                        .into_iter()
                        .find(|&k| sagnac_readout(k) == (rail, pol))
                        .expect("four detectors, four outcomes")
                };
                Record {
                    bsm: [BsmOutcome::Bell(bell(det[0])), BsmOutcome::Bell(bell(det[1]))],
                    bits: [det[2], det[3]],
                }
            }
        }
    }

    fn arm_counts(&self, key: &[u16]) -> Vec<u8> {
        self.arms
            .iter()
            .map(|modes| key.iter().filter(|m| modes.contains(m)).count() as u8)
            .collect()
    }
}

/// `P(record | φ) = Σ_Δ Re(C_Δ · e^{iΔ·φ})` for one emission configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigHarmonics {
    pub pairs: Vec<usize>,
    pub weight: f64,
    /// Per record index: `(Δ, C_Δ)` over all drift-arm photon-number
    /// differences. Raw records, before corrections.
    pub terms: Vec<Vec<(Vec<i8>, C64)>>,
}

/// Exact detection statistics of one setting as a function of the drift
/// phases, for every emission configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Harmonics {
    pub gate: GateKind,
    pub setting: Setting,
    pub records: Vec<Record>,
    pub configs: Vec<ConfigHarmonics>,
    /// Weight of configurations above the photon cap.
    pub truncated: f64,
    pub arms: usize,
    /// Corrected record index for each raw record index.
    pub corrected: Vec<usize>,
}

/// Exact record probabilities per emitted pulse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub records: Vec<(Record, f64)>,
    /// Total accepted probability.
    pub acceptance: f64,
    pub truncated: f64,
}

impl Distribution {
    /// `P(bits | accepted)` indexed by `2·b₁ + b₂`.
    pub fn conditional_bits(&self) -> Result<[f64; 4]> {
        if self.acceptance <= 0.0 {
            return Err(Error::ZeroAcceptance);
        }
        let mut out = [0.0; 4];
        for (r, p) in &self.records {
            out[(2 * r.bits[0] + r.bits[1]) as usize] += p / self.acceptance;
        }
        Ok(out)
    }

    pub fn probability(&self, rec: &Record) -> f64 {
        self.records
            .iter()
            .find(|(r, _)| r == rec)
            .map(|(_, p)| *p)
            .unwrap_or(0.0)
    }
}

/// Photon-level model of a gate with the physical imperfections.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonModel {
    pub gate: GateKind,
    pub noise: NoiseParams,
    pub corrections: bool,
}

impl PhotonModel {
    pub fn new(gate: GateKind, noise: NoiseParams, corrections: bool) -> Result<Self> {
        noise.validate()?;
        Ok(PhotonModel {
            gate,
            noise,
            corrections,
        })
    }

    fn photons_per_pair(&self) -> Vec<usize> {
        match self.gate {
            GateKind::Cnot => vec![2, 2, 2],
            GateKind::Cphase => vec![2, 2],
        }
    }

    pub fn harmonics(&self, setting: &Setting) -> Result<Harmonics> {
        let exp = Experiment::build(self.gate, &self.noise, setting)?;
        let records = gate_records(self.gate.default_bsm());
        let index: HashMap<Record, usize> = records.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        let (emissions, truncated) = emission_configurations(&self.photons_per_pair(), self.noise.p2);
        let configs = emissions
            .par_iter()
            .map(|em| {
                let terms = config_terms(&exp, &em.pairs, &index, records.len())?;
                Ok(ConfigHarmonics {
                    pairs: em.pairs.clone(),
                    weight: em.weight,
                    terms,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let corrected = records.iter().map(|r| index[&self.correct(r, setting)]).collect();
        Ok(Harmonics {
            gate: self.gate,
            setting: setting.clone(),
            records,
            configs,
            truncated,
            arms: exp.arms.len(),
            corrected,
        })
    }

    /// Exact distribution averaged over the Gaussian drift.
    pub fn distribution(&self, setting: &Setting) -> Result<Distribution> {
        Ok(self.harmonics(setting)?.averaged(self.noise.phase_drift))
    }

    /// Flip each output bit whose correction factor anticommutes with the
    /// measured Pauli.
    fn correct(&self, r: &Record, setting: &Setting) -> Record {
        if !self.corrections {
            return *r;
        }
        let c = self
            .gate
            .corrections()
            .get_outcomes(r.bsm[0], r.bsm[1])
            .expect("heralded outcomes have corrections");
        let mut out = *r;
        for (q, label) in self.gate.outputs().iter().enumerate() {
            if !c.factor(label).commutes_with(setting.bases[q].pauli()) {
                out.bits[q] ^= 1;
            }
        }
        out
    }
}

/// Per record, the interference terms keyed by arm-count differences.
type RecordTerms = Vec<Vec<(Vec<i8>, C64)>>;
/// Record index of one output key and its amplitudes by arm photon counts.
type Branches = (usize, Vec<(Vec<u8>, C64)>);

fn config_terms(
    exp: &Experiment,
    pairs: &[usize],
    index: &HashMap<Record, usize>,
    n_records: usize,
) -> Result<RecordTerms> {
    let emitted: FockState = exp.sources.emit(&exp.reg, pairs)?.apply_all(&exp.pre)?;
    let parts = if exp.arms.is_empty() {
        BTreeMap::from([(Vec::new(), emitted)])
    } else {
        emitted.partition(|k| exp.arm_counts(k))
    };
    let mut per_key: HashMap<Photons, Branches> = HashMap::new();
    for (counts, part) in parts {
        let out = part.apply_all(&exp.post)?;
        for (key, amp) in out.terms() {
            let Some(det) = exp.stations_fired(key) else { continue };
            let rec = index[&exp.raw_record(&det)];
            per_key
                .entry(key.clone())
                .or_insert_with(|| (rec, Vec::new()))
                .1
                .push((counts.clone(), *amp));
        }
    }
    let mut acc: Vec<BTreeMap<Vec<i8>, C64>> = vec![BTreeMap::new(); n_records];
    for (_, (rec, amps)) in per_key {
        for (k, a) in &amps {
            for (k2, b) in &amps {
                let delta: Vec<i8> = k.iter().zip(k2).map(|(x, y)| *x as i8 - *y as i8).collect();
                *acc[rec].entry(delta).or_default() += a * b.conj();
            }
        }
    }
    Ok(acc.into_iter().map(|m| m.into_iter().collect()).collect())
}

impl Harmonics {
    fn raw_probability(terms: &[(Vec<i8>, C64)], phases: &[f64]) -> f64 {
        terms
            .iter()
            .map(|(d, c)| {
                let arg: f64 = d.iter().zip(phases).map(|(&x, p)| x as f64 * p).sum();
                (c * C64::from_polar(1.0, arg)).re
            })
            .sum::<f64>()
            .max(0.0)
    }

    /// Corrected record probabilities of configuration `config` at fixed
    /// drift phases (one per arm).
    pub fn probabilities_at(&self, config: usize, phases: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.records.len()];
        for (i, t) in self.configs[config].terms.iter().enumerate() {
            out[self.corrected[i]] += Self::raw_probability(t, phases);
        }
        out
    }

    /// Gaussian average over the drift, `E[e^{imφ}] = e^{−m²σ²/2}`.
    pub fn averaged(&self, sigma: f64) -> Distribution {
        let mut p = vec![0.0; self.records.len()];
        for cfg in &self.configs {
            for (i, t) in cfg.terms.iter().enumerate() {
                let v: f64 = t
                    .iter()
                    .map(|(d, c)| {
                        let damp: f64 = d.iter().map(|&x| (-0.5 * (x as f64 * sigma).powi(2)).exp()).product();
                        c.re * damp
                    })
                    .sum();
                p[self.corrected[i]] += cfg.weight * v.max(0.0);
            }
        }
        let acceptance = p.iter().sum();
        Distribution {
            records: self.records.iter().copied().zip(p).collect(),
            acceptance,
            truncated: self.truncated,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analyzers_map_eigenstates_to_h_and_v() {
        let reg = Arc::new(ModeRegistry::new(["a"], 1).unwrap());
        for basis in Basis::ALL {
            for bit in 0..2u8 {
                let q = basis.eigenstate(bit).amplitudes();
                let terms = Polarization::BOTH.map(|p| (vec![reg.mode_index("a", p, 0).unwrap()], q[p.bit() as usize]));
                let out = FockState::from_terms(reg.clone(), terms.into_iter().filter(|(_, a)| a.norm() > 0.0))
                    .unwrap()
                    .apply(&analyzer("a", basis))
                    .unwrap();
                let m = reg.mode_index("a", Polarization::from_bit(bit), 0).unwrap();
                assert!((out.amplitude(&[m]).norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ideal_cphase_truth_table() {
        let model = PhotonModel::new(GateKind::Cphase, NoiseParams::ideal(), true).unwrap();
        let d = model
            .distribution(&Setting::named(NamedQubit::V, NamedQubit::Plus, [Basis::Z, Basis::X]))
            .unwrap();
        // |V+⟩ → |V−⟩
        let p = d.conditional_bits().unwrap();
        assert!((p[3] - 1.0).abs() < 1e-9, "{p:?}");
        assert!((d.acceptance - 0.25).abs() < 1e-9);
    }

    #[test]
    fn ideal_cnot_truth_table_row() {
        let model = PhotonModel::new(GateKind::Cnot, NoiseParams::ideal(), true).unwrap();
        let d = model
            .distribution(&Setting::named(NamedQubit::H, NamedQubit::V, [Basis::Z, Basis::Z]))
            .unwrap();
        let p = d.conditional_bits().unwrap();
        assert!((p[3] - 1.0).abs() < 1e-9, "{p:?}");
        // resource post-selection 1/9 and two partial analyzers at 1/2 each
        assert!((d.acceptance - 1.0 / 36.0).abs() < 1e-9, "{}", d.acceptance);
    }
}
