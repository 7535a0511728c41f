use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Analysis, InputSetting, InputState, Mode, QubitInput, Replay, Scenario};
use crate::metrics::{
    classical_fidelity, complementary_pair, concurrence_lower_bound, correction_comparison, correlation,
    entanglement_witness, entangling_input, parallelism_criterion, parallelism_term_diff,
    phi_plus_fidelity_from_correlations, process_fidelity, process_fidelity_bounds, ClassicalFidelity,
    ConditionalTable, CorrectionComparison, CriterionResult, Estimate, Pair, ProcessBounds, TermDiff, WitnessKind,
};
use crate::noise::{
    draw, run_shots, stream_key, tally, Distribution, PhotonModel, QubitModel, Record, Setting, ShotResult,
};
use crate::protocols::{
    prepare_cluster_chi, prepare_hyper_chi, prepare_lambda, BsmOutcome, ClusterPrep, CorrectionTable, GateKind,
    PpbsParams, PrintedTable, ResourceKind, ResourceState, TableDiff,
};
use crate::qubit::{NamedQubit, PureState, QubitState};
use crate::{Basis, Error, Result};

pub const REPORT_SCHEMA: &str = "telegate.report/v1";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Qubit,
    Photon,
    Replay,
    Preparation,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Ok,
    /// At least one setting accepted no events.
    ZeroAcceptance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRow {
    pub bsm: [BsmOutcome; 2],
    pub bits: [u8; 2],
    /// Output eigenstates, e.g. `H+`.
    pub output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingReport {
    pub input: String,
    pub bases: [Basis; 2],
    /// Accepted events per pulse.
    pub acceptance: Estimate,
    /// Weight of emission configurations beyond the photon cap.
    pub truncated: Estimate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepted: Option<u64>,
    /// `P(b₁b₂ | accepted)` for bits `00, 01, 10, 11`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditional: Option<[Estimate; 4]>,
    pub outcomes: Vec<OutcomeRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglingReport {
    /// Signed stabilizer expectations of the ideal output, keyed by bases.
    pub correlations: BTreeMap<String, Estimate>,
    pub fidelity: Estimate,
    pub witness: CriterionResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// Symbols of the two classical fidelities used.
    pub from: [String; 2],
    pub process: ProcessBounds,
    pub concurrence: Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessReport {
    pub fidelity: f64,
    /// Concurrence of the output on the entangling input.
    pub concurrence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub within_bounds: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub above_concurrence_bound: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub kind: ResourceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
    pub fidelity: Estimate,
    pub witness: CriterionResult,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Classical fidelities keyed by symbol (`F_zz`, `F_zx`, ...).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub classical: BTreeMap<String, Estimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entangling: Option<EntanglingReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallelism: Option<CriterionResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrections: Option<CorrectionComparison>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resource: Option<ResourceReport>,
}

/// Derived tables compared with their printed forms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    #[serde(default)]
    pub correction_tables: Vec<TableDiff>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallelism_terms: Option<TermDiff>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_unix: Option<u64>,
    pub scenario: Scenario,
    pub status: RunStatus,
    pub model: ModelKind,
    pub settings: Vec<SettingReport>,
    pub metrics: MetricsReport,
    pub oracle: OracleReport,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl RunReport {
    /// Invariants an exact run must satisfy; sampled runs are exempt.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.scenario.mode != Mode::Exact {
            return v;
        }
        if let Some(p) = &self.metrics.process {
            if p.within_bounds == Some(false) {
                v.push(format!(
                    "process fidelity {} outside the complementary bounds",
                    p.fidelity
                ));
            }
            if p.above_concurrence_bound == Some(false) {
                v.push(format!("concurrence {} below its lower bound", p.concurrence));
            }
        }
        for s in &self.settings {
            if let Some(c) = &s.conditional {
                let total: f64 = c.iter().map(|e| e.value).sum();
                if (total - 1.0).abs() > 1e-9 {
                    v.push(format!(
                        "{} [{:?}] conditional probabilities sum to {total}",
                        s.input, s.bases
                    ));
                }
            }
        }
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Process exit status for an error: 2 for bad input, 3 for zero
/// acceptance, 4 for anything else.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::InvalidParameter(_)
        | Error::UnknownLabel(_)
        | Error::UnknownPath(_)
        | Error::NotNormalized(_)
        | Error::DuplicateLabel(_) => 2,
        Error::ZeroAcceptance => 3,
        _ => 4,
    }
}

// square roots of eigenvalues amplify rounding to about 1e-8
const CONCURRENCE_TOL: f64 = 1e-6;

/// One simulated setting.
#[derive(Clone, Debug)]
struct Job {
    input: InputState,
    bases: [Basis; 2],
}

impl Job {
    fn named(p: Pair, bases: [Basis; 2]) -> Job {
        Job {
            input: InputState::Product(p.map(QubitInput::Named)),
            bases,
        }
    }

    fn setting(&self) -> Result<Option<Setting>> {
        match &self.input {
            InputState::Product([a, b]) => Ok(Some(Setting {
                inputs: [a.amplitudes()?, b.amplitudes()?],
                bases: self.bases,
            })),
            InputState::Bell(_) => Ok(None),
        }
    }

    fn state(&self, gate: GateKind) -> Result<PureState> {
        let [l1, l2] = gate.inputs();
        match &self.input {
            InputState::Bell(k) => crate::qubit::bell_state(*k, l1, l2),
            InputState::Product(_) => crate::noise::product_input(gate, &self.setting()?.expect("product input")),
        }
    }

    fn key(&self, gate: GateKind) -> u64 {
        let body = match self.setting() {
            Ok(Some(s)) => serde_json::to_string(&s).expect("setting serializes"),
            _ => format!("{}:{:?}", self.input.label(), self.bases),
        };
        stream_key(format!("{}:{body}", gate.name()).as_bytes())
    }
}

/// Non-identity Pauli products, with sign, that stabilize `target`.
pub fn stabilizer_terms(target: &PureState) -> Result<Vec<([Basis; 2], f64)>> {
    let labels = target.register().to_vec();
    let mut out = Vec::new();
    for b1 in Basis::ALL {
        for b2 in Basis::ALL {
            let mut e = 0.0;
            for bits in 0..4u8 {
                let proj = PureState::product([
                    (labels[0].clone(), b1.eigenstate(bits >> 1)),
                    (labels[1].clone(), b2.eigenstate(bits & 1)),
                ])?;
                let sign = if (bits.count_ones() % 2) == 0 { 1.0 } else { -1.0 };
                e += sign * proj.inner(target)?.norm_sqr();
            }
            if (e.abs() - 1.0).abs() < 1e-9 {
                out.push(([b1, b2], e.signum()));
            }
        }
    }
    Ok(out)
}

/// Named product input whose ideal output is maximally entangled.
pub fn entangling_pair(gate: GateKind) -> Pair {
    match gate {
        GateKind::Cnot => [NamedQubit::H, NamedQubit::Plus],
        GateKind::Cphase => [NamedQubit::Plus, NamedQubit::Plus],
    }
}

fn basis_key(b: [Basis; 2]) -> String {
    format!("{:?}{:?}", b[0], b[1])
}

fn classical_needs(gate: GateKind, analyses: &[Analysis]) -> Vec<ClassicalFidelity> {
    let mut out = Vec::new();
    for a in analyses {
        let add: Vec<ClassicalFidelity> = match a {
            Analysis::TruthTable => vec![ClassicalFidelity::TruthTable],
            Analysis::Complementary => complementary_pair(gate).to_vec(),
            Analysis::Parallelism => vec![
                ClassicalFidelity::Zx,
                ClassicalFidelity::Xz,
                ClassicalFidelity::Parallelism,
            ],
            _ => vec![],
        };
        for f in add {
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
    out
}

fn entangling_target(gate: GateKind) -> Result<PureState> {
    let out = gate.reference(&entangling_input(gate)?)?;
    out.reorder(&gate.outputs())
}

fn jobs(scenario: &Scenario, gate: GateKind) -> Result<Vec<Job>> {
    let analyses = scenario.analyses();
    let mut jobs: Vec<Job> = Vec::new();
    let mut push = |j: Job| {
        if !jobs.iter().any(|k| k.input == j.input && k.bases == j.bases) {
            jobs.push(j);
        }
    };
    for f in classical_needs(gate, &analyses) {
        for p in f.inputs() {
            push(Job::named(p, f.output_bases()));
        }
    }
    if analyses.contains(&Analysis::Entangling) {
        for (b, _) in stabilizer_terms(&entangling_target(gate)?)? {
            push(Job::named(entangling_pair(gate), b));
        }
    }
    for InputSetting { state, bases } in &scenario.inputs {
        push(Job {
            input: *state,
            bases: *bases,
        });
    }
    Ok(jobs)
}

enum Engine {
    Qubit(QubitModel),
    Photon(PhotonModel),
}

fn output_label(bases: [Basis; 2], bits: [u8; 2]) -> String {
    format!("{}{}", bases[0].eigenstate(bits[0]), bases[1].eigenstate(bits[1]))
}

fn exact_report(job: &Job, d: &Distribution) -> SettingReport {
    SettingReport {
        input: job.input.label(),
        bases: job.bases,
        acceptance: Estimate::exact(d.acceptance),
        truncated: Estimate::exact(d.truncated),
        shots: None,
        accepted: None,
        conditional: d.conditional_bits().ok().map(|c| c.map(Estimate::exact)),
        outcomes: d
            .records
            .iter()
            .map(|(r, p)| OutcomeRow {
                bsm: r.bsm,
                bits: r.bits,
                output: output_label(job.bases, r.bits),
                probability: Some(*p),
                count: None,
            })
            .collect(),
    }
}

fn shot_report(job: &Job, r: &ShotResult) -> SettingReport {
    SettingReport {
        input: job.input.label(),
        bases: job.bases,
        acceptance: r.acceptance(),
        truncated: Estimate::binomial(r.truncated, r.shots),
        shots: Some(r.shots),
        accepted: Some(r.accepted),
        conditional: r.conditional_bits().ok(),
        outcomes: r
            .records
            .iter()
            .map(|(rec, k)| OutcomeRow {
                bsm: rec.bsm,
                bits: rec.bits,
                output: output_label(job.bases, rec.bits),
                probability: None,
                count: Some(*k),
            })
            .collect(),
    }
}

fn sample(d: &Distribution, shots: u64, seed: u64, key: u64) -> ShotResult {
    let probs: Vec<f64> = d.records.iter().map(|(_, p)| *p).collect();
    let (counts, _, _) = tally(probs.len(), shots, seed, key, |rng| draw(&probs, rng));
    let records: Vec<(Record, u64)> = d.records.iter().map(|(r, _)| *r).zip(counts).collect();
    ShotResult {
        accepted: records.iter().map(|(_, k)| k).sum(),
        records,
        shots,
        truncated: 0,
    }
}

impl Engine {
    fn evaluate(&self, gate: GateKind, job: &Job, mode: Mode, seed: u64) -> Result<SettingReport> {
        match (self, mode) {
            (Engine::Qubit(m), Mode::Exact) => {
                Ok(exact_report(job, &m.distribution_for(&job.state(gate)?, job.bases)?))
            }
            (Engine::Qubit(m), Mode::Shots(n)) => {
                let d = m.distribution_for(&job.state(gate)?, job.bases)?;
                Ok(shot_report(job, &sample(&d, n, seed, job.key(gate))))
            }
            (Engine::Photon(m), mode) => {
                let setting = job
                    .setting()?
                    .ok_or_else(|| Error::InvalidParameter("entangled input".into()))?;
                let h = m.harmonics(&setting)?;
                match mode {
                    Mode::Exact => Ok(exact_report(job, &h.averaged(m.noise.phase_drift))),
                    Mode::Shots(n) => Ok(shot_report(
                        job,
                        &run_shots(&h, m.noise.p2, m.noise.phase_drift, n, seed)?,
                    )),
                }
            }
        }
    }
}

fn cluster_prep(scenario: &Scenario) -> ClusterPrep {
    ClusterPrep {
        main: scenario.noise.main_ppbs(),
        balance: PpbsParams::BALANCE,
        overlap: scenario.noise.overlap.resource,
        wave_plates: true,
    }
}

fn resource_report(r: &ResourceState) -> Result<ResourceReport> {
    let fidelity = Estimate::exact(r.fidelity()?);
    Ok(ResourceReport {
        kind: r.kind,
        probability: Some(r.probability),
        fidelity,
        witness: entanglement_witness(fidelity, WitnessKind::FourQubitCluster)?,
    })
}

fn oracle_report(gate: Option<GateKind>) -> Result<OracleReport> {
    let Some(gate) = gate else {
        return Ok(OracleReport::default());
    };
    Ok(OracleReport {
        correction_tables: vec![PrintedTable::builtin(gate).compare(CorrectionTable::derived(gate))?],
        parallelism_terms: match gate {
            GateKind::Cphase => Some(parallelism_term_diff()?),
            GateKind::Cnot => None,
        },
    })
}

fn bounds_from(gate: GateKind, classical: &BTreeMap<String, Estimate>) -> Result<Option<BoundsReport>> {
    let [a, b] = complementary_pair(gate);
    let (Some(fa), Some(fb)) = (classical.get(a.symbol()), classical.get(b.symbol())) else {
        return Ok(None);
    };
    Ok(Some(BoundsReport {
        from: [a.symbol().into(), b.symbol().into()],
        process: process_fidelity_bounds(*fa, *fb)?,
        concurrence: concurrence_lower_bound(*fa, *fb)?,
    }))
}

fn parallelism_from(classical: &BTreeMap<String, Estimate>) -> Result<Option<CriterionResult>> {
    let get = |f: ClassicalFidelity| classical.get(f.symbol()).copied();
    match (
        get(ClassicalFidelity::Zx),
        get(ClassicalFidelity::Xz),
        get(ClassicalFidelity::Parallelism),
    ) {
        (Some(a), Some(b), Some(c)) => Ok(Some(parallelism_criterion(a, b, c)?)),
        _ => Ok(None),
    }
}

fn replay_metrics(scenario: &Scenario, replay: &Replay) -> Result<MetricsReport> {
    let mut m = MetricsReport::default();
    if let Some(gate) = scenario.gate.gate() {
        for (f, v) in [
            (ClassicalFidelity::TruthTable, replay.truth_table),
            (ClassicalFidelity::Zx, replay.zx),
            (ClassicalFidelity::Xz, replay.xz),
            (ClassicalFidelity::Xx, replay.xx),
            (ClassicalFidelity::Parallelism, replay.parallelism),
        ] {
            if let Some(v) = v {
                m.classical.insert(f.symbol().into(), v);
            }
        }
        if let Some(c) = replay.correlations {
            let fidelity = phi_plus_fidelity_from_correlations(c.xx, c.yy, c.zz)?;
            m.entangling = Some(EntanglingReport {
                correlations: [("XX", c.xx), ("YY", c.yy), ("ZZ", c.zz)]
                    .into_iter()
                    .map(|(k, v)| (k.into(), v))
                    .collect(),
                fidelity,
                witness: entanglement_witness(fidelity, WitnessKind::TwoQubitBell)?,
            });
        }
        m.bounds = bounds_from(gate, &m.classical)?;
        if gate == GateKind::Cphase {
            m.parallelism = parallelism_from(&m.classical)?;
        }
    }
    if let Some(f) = replay.resource_fidelity {
        let kind = scenario
            .resource
            .state
            .map(|r| r.kind())
            .or(scenario.gate.gate().map(|g| g.resource_kind()))
            .expect("validated");
        m.resource = Some(ResourceReport {
            kind,
            probability: None,
            fidelity: f,
            witness: entanglement_witness(f, WitnessKind::FourQubitCluster)?,
        });
    }
    Ok(m)
}

/// Execute a validated scenario.
pub fn run(scenario: &Scenario) -> Result<RunReport> {
    scenario
        .validate()
        .map_err(|(k, e)| Error::Parse(format!("{k}: {e}")))?;
    let gate = scenario.gate.gate();
    let mut notes = Vec::new();
    let mut report = RunReport {
        schema: REPORT_SCHEMA.into(),
        generated_unix: None,
        scenario: scenario.clone(),
        status: RunStatus::Ok,
        model: ModelKind::Replay,
        settings: Vec::new(),
        metrics: MetricsReport::default(),
        oracle: oracle_report(gate)?,
        notes: Vec::new(),
    };
    if let Some(replay) = &scenario.replay {
        report.metrics = replay_metrics(scenario, replay)?;
        notes.push("metrics evaluated on replayed values; nothing simulated".into());
        report.notes = notes;
        return Ok(report);
    }
    let Some(gate) = gate else {
        let r = match scenario.resource.state.expect("validated").kind() {
            ResourceKind::ClusterChi => prepare_cluster_chi(&cluster_prep(scenario))?,
            ResourceKind::HyperChi => prepare_hyper_chi(scenario.noise.overlap.resource)?,
            ResourceKind::Lambda => prepare_lambda(scenario.noise.overlap.resource)?,
        };
        report.model = ModelKind::Preparation;
        report.metrics.resource = Some(resource_report(&r)?);
        return Ok(report);
    };

    let photon = scenario.uses_photon_model();
    let engine = if photon {
        report.model = ModelKind::Photon;
        Engine::Photon(PhotonModel::new(gate, scenario.noise.clone(), scenario.corrections)?)
    } else {
        report.model = ModelKind::Qubit;
        Engine::Qubit(QubitModel::new(
            gate,
            &scenario.noise,
            scenario.bsm,
            scenario.corrections,
            scenario.resource.source,
        )?)
    };
    if gate == GateKind::Cphase && scenario.noise.overlap.bsm < 1.0 {
        notes.push("overlap.bsm has no effect on the C-Phase analyzers".into());
    }
    if scenario.noise.p2 > 0.0 {
        notes.push("noise parameters are model inputs, not fitted to any measurement".into());
    }

    let jobs = jobs(scenario, gate)?;
    report.settings = jobs
        .par_iter()
        .map(|j| engine.evaluate(gate, j, scenario.mode, scenario.seed()))
        .collect::<Result<Vec<_>>>()?;
    if report.settings.iter().any(|s| s.conditional.is_none()) {
        report.status = RunStatus::ZeroAcceptance;
    }

    let analyses = scenario.analyses();
    let mut table = ConditionalTable::new();
    for (j, s) in jobs.iter().zip(&report.settings) {
        if let (Some(p), Some(c)) = (j.input.named_pair(), s.conditional) {
            table.add_setting(p, j.bases, c);
        }
    }
    let m = &mut report.metrics;
    for f in ClassicalFidelity::ALL {
        if let Ok(v) = classical_fidelity(gate, f, &table) {
            m.classical.insert(f.symbol().into(), v);
        }
    }
    if analyses.contains(&Analysis::Entangling) {
        m.entangling = entangling_report(gate, &jobs, &report.settings)?;
    }
    if analyses.contains(&Analysis::Complementary) || analyses.contains(&Analysis::Parallelism) {
        m.bounds = bounds_from(gate, &m.classical)?;
    }
    if analyses.contains(&Analysis::Parallelism) {
        m.parallelism = parallelism_from(&m.classical)?;
    }
    if let Engine::Qubit(q) = &engine {
        if analyses.contains(&Analysis::Process) {
            let fidelity = process_fidelity(gate, |s| Ok(q.run(s)?.output))?;
            let concurrence = q
                .run(&QubitState::Pure(entangling_input(gate)?))?
                .output
                .concurrence()?;
            m.process = Some(ProcessReport {
                fidelity,
                concurrence,
                within_bounds: m.bounds.as_ref().map(|b| b.process.contains(fidelity, 1e-9)),
                above_concurrence_bound: m
                    .bounds
                    .as_ref()
                    .map(|b| concurrence >= b.concurrence.value - CONCURRENCE_TOL),
            });
        }
        if analyses.contains(&Analysis::Corrections) {
            let input = entangling_input(gate)?;
            let target = gate.reference(&input)?;
            let mut plain = q.clone();
            plain.corrections = false;
            let mut fixed = q.clone();
            fixed.corrections = true;
            let psi = QubitState::Pure(input);
            m.corrections = Some(correction_comparison(&fixed.run(&psi)?, &plain.run(&psi)?, &target)?);
        }
        if analyses.contains(&Analysis::Resource) || analyses.contains(&Analysis::Process) {
            m.resource = Some(resource_report(&q.resource)?);
        }
    }
    report.notes = notes;
    Ok(report)
}

fn entangling_report(gate: GateKind, jobs: &[Job], settings: &[SettingReport]) -> Result<Option<EntanglingReport>> {
    let pair = entangling_pair(gate);
    let mut correlations = BTreeMap::new();
    let mut terms = Vec::new();
    for (bases, sign) in stabilizer_terms(&entangling_target(gate)?)? {
        let Some((_, s)) = jobs
            .iter()
            .zip(settings)
            .find(|(j, _)| j.input.named_pair() == Some(pair) && j.bases == bases)
        else {
            return Ok(None);
        };
        let Some(c) = &s.conditional else {
            return Ok(None);
        };
        let e = correlation(c, s.accepted);
        correlations.insert(basis_key(bases), e);
        terms.push((0.25 * sign, e));
    }
    let fidelity = match gate {
        GateKind::Cnot => {
            phi_plus_fidelity_from_correlations(correlations["XX"], correlations["YY"], correlations["ZZ"])?
        }
        GateKind::Cphase => Estimate::linear(&terms, 0.25),
    };
    Ok(Some(EntanglingReport {
        correlations,
        fidelity,
        witness: entanglement_witness(fidelity, WitnessKind::TwoQubitBell)?,
    }))
}
