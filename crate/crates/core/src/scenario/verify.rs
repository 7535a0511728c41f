use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::config::{GateChoice, Mode, Scenario};
use super::run::run;
use super::sweep::{column, sweep, FIDELITY_COLUMNS};
use crate::fock::{ModeRegistry, OpticalElement, Polarization};
use crate::metrics::{
    complementary_fidelities, complementary_pair, concurrence_lower_bound, correction_comparison, entangling_input,
    parallelism_criterion, parallelism_fidelity, parallelism_term_diff, phi_plus_fidelity_from_correlations,
    process_fidelity, process_fidelity_bounds, ClassicalFidelity, ConditionalTable, Estimate,
};
use crate::noise::{NoiseParams, Overlaps, PhotonModel, QubitModel, ResourceSource};
use crate::protocols::{
    cluster_sources, prepare_cluster_chi, prepare_hyper_chi, prepare_lambda, run_gate, BsmMode, ClusterPrep,
    CorrectionTable, GateKind, GateOptions, PpbsParams, PrintedTable, ResourceState,
};
use crate::qubit::{PureState, QubitState};
use crate::{Error, Result, C64};

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    /// Smaller random samples and no sweeps.
    pub quick: bool,
    /// Directory with replacement printed-table assets.
    pub assets_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub checks: Vec<Check>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

type Outcome = Result<(bool, String)>;

fn random_state(gate: GateKind, rng: &mut ChaCha8Rng) -> Result<PureState> {
    let amps: Vec<C64> = (0..4)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    Ok(PureState::normalized(gate.inputs().to_vec(), amps)?.0)
}

/// Every complete-analyzer branch, corrected, reproduces the gate unitary.
pub fn check_correction_table(gate: GateKind, inputs: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let res = ResourceState::ideal(gate.resource_kind());
    let opts = GateOptions {
        bsm: Some(BsmMode::Complete),
        ..GateOptions::default()
    };
    let mut cells = std::collections::BTreeSet::new();
    let mut worst = 1.0f64;
    for _ in 0..inputs {
        let psi = random_state(gate, &mut rng)?;
        let target = gate.reference(&psi)?;
        for b in run_gate(gate, &QubitState::Pure(psi), &res, &opts)?.branches {
            worst = worst.min(b.state.fidelity(&target)?);
            cells.insert(b.outcomes);
        }
    }
    Ok((
        cells.len() == 16 && worst >= 1.0 - 1e-9,
        format!("{} cells x {inputs} inputs, worst fidelity {worst:.12}", cells.len()),
    ))
}

fn printed_table(gate: GateKind, dir: &Option<PathBuf>) -> Result<PrintedTable> {
    let file = match gate {
        GateKind::Cnot => "cnot_byproducts.json",
        GateKind::Cphase => "cphase_corrections.json",
    };
    match dir {
        Some(d) => {
            let p = d.join(file);
            let text = std::fs::read_to_string(&p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
            PrintedTable::from_json(&text)
        }
        None => Ok(PrintedTable::builtin(gate)),
    }
}

/// Printed table against the oracle: the discrepant cells must be exactly
/// the documented errata.
pub fn check_printed_table(gate: GateKind, dir: &Option<PathBuf>) -> Outcome {
    let diff = printed_table(gate, dir)?.compare(CorrectionTable::derived(gate))?;
    let found = diff.discrepancies();
    let cells: Vec<String> = diff
        .cells
        .iter()
        .filter(|c| !c.agrees_up_to_phase)
        .map(|c| {
            format!(
                "({}, {}) printed {} derived {}",
                c.first, c.second, c.printed, c.derived
            )
        })
        .collect();
    let agree = diff.cells.iter().filter(|c| c.agrees_up_to_phase).count();
    let detail = if cells.is_empty() {
        format!("{agree}/16 cells agree up to phase")
    } else {
        format!("{agree}/16 cells agree up to phase; differing: {}", cells.join("; "))
    };
    let pass = diff.matches_errata();
    Ok((
        pass,
        if pass || found.is_empty() {
            detail
        } else {
            format!("{detail}; documented errata: {:?}", diff.expected_errata)
        },
    ))
}

fn qubit_table(m: &QubitModel, fids: &[ClassicalFidelity]) -> Result<ConditionalTable> {
    let mut t = ConditionalTable::new();
    for &f in fids {
        for (input, s) in f.inputs().into_iter().zip(f.settings()) {
            t.add_setting(
                input,
                s.bases,
                m.distribution(&s)?.conditional_bits()?.map(Estimate::exact),
            );
        }
    }
    Ok(t)
}

pub fn check_parallelism_terms() -> Outcome {
    let diff = parallelism_term_diff()?;
    let m = QubitModel::new(
        GateKind::Cphase,
        &NoiseParams::ideal(),
        None,
        true,
        ResourceSource::Ideal,
    )?;
    let f = parallelism_fidelity(&qubit_table(&m, &[ClassicalFidelity::Parallelism])?)?;
    Ok((
        (f.value - 1.0).abs() < 1e-9 && diff.derived.len() == 8,
        format!(
            "ideal fidelity {:.12} on the derived set; printed only {:?}, derived only {:?}",
            f.value, diff.printed_only, diff.derived_only
        ),
    ))
}

/// Amplitude of `|VVVV⟩` relative to `|HHHH⟩` after the entangling PPBS.
pub fn ppbs_vvvv_ratio() -> Result<C64> {
    let cfg = cluster_sources(1.0)?;
    let reg = Arc::new(ModeRegistry::new(["3", "4", "5", "6"], cfg.internal_modes())?);
    let out = cfg
        .emit(&reg, &[1, 1])?
        .apply(&OpticalElement::ppbs("4", "6", 1.0, 1.0 / 3.0))?;
    let modes = |pol: Polarization| -> Result<Vec<u16>> {
        let mut v = ["3", "4", "5", "6"]
            .iter()
            .map(|p| reg.mode_index(p, pol, 0))
            .collect::<Result<Vec<_>>>()?;
        v.sort();
        Ok(v)
    };
    Ok(out.amplitude(&modes(Polarization::V)?) / out.amplitude(&modes(Polarization::H)?))
}

pub fn check_cluster() -> Outcome {
    let r = prepare_cluster_chi(&ClusterPrep::default())?;
    let f = r.fidelity()?;
    let ratio = ppbs_vvvv_ratio()?;
    Ok((
        (r.probability - 1.0 / 9.0).abs() < 1e-12
            && (f - 1.0).abs() < 1e-9
            && (ratio - C64::new(-1.0 / 3.0, 0.0)).norm() < 1e-12,
        format!(
            "probability {:.15}, fidelity {f:.12}, VVVV/HHHH amplitude {ratio:.15}",
            r.probability
        ),
    ))
}

pub fn check_hyper_resources() -> Outcome {
    let l = prepare_lambda(1.0)?;
    let h = prepare_hyper_chi(1.0)?;
    let (fl, fh) = (l.fidelity()?, h.fidelity()?);
    Ok((
        (fl - 1.0).abs() < 1e-9 && (fh - 1.0).abs() < 1e-9,
        format!(
            "lambda fidelity {fl:.12} (p = {:.6}), hyper fidelity {fh:.12} (p = {:.6})",
            l.probability, h.probability
        ),
    ))
}

/// Photon model and qubit model agree record by record without noise.
pub fn check_zero_noise() -> Outcome {
    let mut worst = 0.0f64;
    for gate in GateKind::ALL {
        let photon = PhotonModel::new(gate, NoiseParams::ideal(), true)?;
        let qubit = QubitModel::new(gate, &NoiseParams::ideal(), None, true, ResourceSource::Optical)?;
        for f in [ClassicalFidelity::Zx, ClassicalFidelity::Parallelism] {
            for s in f.settings() {
                let (a, b) = (photon.distribution(&s)?, qubit.distribution(&s)?);
                for ((ra, pa), (rb, pb)) in a.records.iter().zip(&b.records) {
                    if ra != rb {
                        return Ok((false, format!("record order differs at {ra:?}")));
                    }
                    worst = worst.max((pa - pb).abs());
                }
            }
        }
    }
    Ok((worst < 1e-12, format!("largest record difference {worst:.2e}")))
}

pub fn check_metric_arithmetic() -> Outcome {
    let e = Estimate::exact;
    let f6 = phi_plus_fidelity_from_correlations(e(0.462), e(-0.434), e(0.403))?.value;
    let b = process_fidelity_bounds(e(0.79), e(0.82))?;
    let c = concurrence_lower_bound(e(0.79), e(0.82))?.value;
    let p = parallelism_criterion(e(0.79), e(0.82), e(0.81))?;
    let pass = (f6 - 0.57475).abs() < 1e-12
        && (b.lower.value - 0.61).abs() < 1e-12
        && (b.upper.value - 0.79).abs() < 1e-12
        && (c - 0.22).abs() < 1e-12
        && (p.value.value - 0.8066666666666666).abs() < 1e-12
        && p.pass;
    Ok((
        pass,
        format!(
            "F = {f6:.5}, bounds ({:.2}, {:.2}), C >= {c:.2}, parallelism {:.4} pass = {}",
            b.lower.value, b.upper.value, p.value.value, p.pass
        ),
    ))
}

pub fn check_correction_comparison() -> Outcome {
    let gate = GateKind::Cphase;
    let input = entangling_input(gate)?;
    let target = gate.reference(&input)?;
    let res = ResourceState::ideal(gate.resource_kind());
    let go = |corrections| {
        run_gate(
            gate,
            &QubitState::Pure(input.clone()),
            &res,
            &GateOptions {
                corrections,
                ..GateOptions::default()
            },
        )
    };
    let cmp = correction_comparison(&go(true)?, &go(false)?, &target)?;
    let mut brute_ok = true;
    for row in &cmp.rows {
        let a = row.outcomes[0].parse()?;
        let b = row.outcomes[1].parse()?;
        let c = gate
            .corrections()
            .get(a, b)
            .ok_or_else(|| Error::MissingEntry("correction".into()))?;
        let brute = target.inner(&target.apply_pauli(c)?)?.norm_sqr();
        brute_ok &= (row.uncorrected - brute).abs() < 1e-12;
    }
    Ok((
        cmp.rows.len() == 16
            && (cmp.uncorrected_average - 0.25).abs() < 1e-12
            && (cmp.corrected_average - 1.0).abs() < 1e-9
            && brute_ok,
        format!(
            "{} outcomes, uncorrected average {:.12}, corrected average {:.12}",
            cmp.rows.len(),
            cmp.uncorrected_average,
            cmp.corrected_average
        ),
    ))
}

/// Partial analyzers keep a quarter of the events and condition to the
/// same output as complete ones.
pub fn check_partial_bsm() -> Outcome {
    let gate = GateKind::Cnot;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut ratio = 0.0;
    for _ in 0..5 {
        let psi = random_state(gate, &mut rng)?;
        let target = gate.reference(&psi)?;
        let res = ResourceState::ideal(gate.resource_kind());
        let go = |bsm| {
            run_gate(
                gate,
                &QubitState::Pure(psi.clone()),
                &res,
                &GateOptions {
                    bsm: Some(bsm),
                    ..GateOptions::default()
                },
            )
        };
        let (p, c) = (go(BsmMode::PartialPhi)?, go(BsmMode::Complete)?);
        worst = worst.max((p.output.fidelity(&target)? - c.output.fidelity(&target)?).abs());
        ratio = p.success_probability / c.success_probability;
    }
    Ok((
        worst < 1e-9 && (ratio - 0.25).abs() < 1e-12,
        format!("acceptance ratio {ratio:.12}, largest fidelity difference {worst:.2e}"),
    ))
}

pub fn check_reproducibility() -> Outcome {
    let mut s = Scenario::new(GateChoice::Cphase);
    s.mode = Mode::Shots(20_000);
    s.seed = Some(11);
    s.noise.phase_drift = 0.2;
    s.noise.sagnac_drift = true;
    s.noise.p2 = 0.01;
    s.analyses = vec![super::config::Analysis::Complementary];
    let a = run(&s)?.to_json();
    let b = run(&s)?.to_json();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Protocol(e.to_string()))?;
    let c = pool.install(|| run(&s))?.to_json();
    Ok((
        a == b && a == c,
        format!("{} bytes, three runs identical: {}", a.len(), a == b && a == c),
    ))
}

pub fn random_noise(rng: &mut ChaCha8Rng) -> NoiseParams {
    NoiseParams {
        overlap: Overlaps {
            resource: rng.random_range(0.3..1.0),
            bsm: 1.0,
        },
        ppbs_ports: Some([
            PpbsParams {
                t_h: rng.random_range(0.85..1.0),
                t_v: rng.random_range(0.25..0.42),
            },
            PpbsParams {
                t_h: rng.random_range(0.85..1.0),
                t_v: rng.random_range(0.25..0.42),
            },
        ]),
        phase_drift: rng.random_range(0.0..1.2),
        sagnac_drift: rng.random(),
        ..NoiseParams::ideal()
    }
}

/// Process fidelity inside the complementary bounds and concurrence above
/// its bound, on random noise settings.
pub fn check_bound_soundness(samples: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut margin = f64::INFINITY;
    for _ in 0..samples {
        let noise = random_noise(&mut rng);
        for gate in GateKind::ALL {
            let m = QubitModel::new(gate, &noise, None, true, ResourceSource::Optical)?;
            let (a, b) = complementary_fidelities(gate, &qubit_table(&m, &complementary_pair(gate))?)?;
            let bounds = process_fidelity_bounds(a, b)?;
            let fp = process_fidelity(gate, |s| Ok(m.run(s)?.output))?;
            let c = m
                .run(&QubitState::Pure(entangling_input(gate)?))?
                .output
                .concurrence()?;
            let cb = concurrence_lower_bound(a, b)?.value;
            if !bounds.contains(fp, 1e-9) || c < cb - 1e-6 {
                return Ok((
                    false,
                    format!("{gate:?} {noise:?}: F = {fp}, bounds {bounds:?}, C = {c} vs {cb}"),
                ));
            }
            margin = margin.min(fp - bounds.lower.value).min(bounds.upper.value - fp);
        }
    }
    Ok((
        true,
        format!("{samples} noise settings x 2 gates, smallest interval margin {margin:.4}"),
    ))
}

/// The five-point sweeps used for the monotonicity check.
pub fn monotonicity_sweeps() -> Vec<(GateChoice, &'static str, Vec<f64>)> {
    let v = vec![1.0, 0.95, 0.9, 0.8, 0.6];
    let p2 = vec![0.0, 0.02, 0.05, 0.1, 0.2];
    vec![
        (GateChoice::Cphase, "noise.overlap.resource", v.clone()),
        (GateChoice::Cphase, "noise.p2", p2.clone()),
        (GateChoice::Cnot, "noise.overlap.resource", v.clone()),
        (GateChoice::Cnot, "noise.overlap.bsm", v),
        (GateChoice::Cnot, "noise.p2", p2),
    ]
}

/// Fidelity columns of `sweep` that increase anywhere along the values.
pub fn increasing_columns(base: &Scenario, axis: &str, values: &[f64]) -> Result<Vec<String>> {
    let pts = sweep(
        base,
        axis,
        &values.iter().map(|v| serde_json::Value::from(*v)).collect::<Vec<_>>(),
    )?;
    let mut bad = Vec::new();
    for name in FIDELITY_COLUMNS {
        let col = column(&pts, axis, name).unwrap_or_default();
        for w in col.windows(2) {
            if let [Some(a), Some(b)] = w {
                if *b > a + 1e-9 {
                    bad.push(format!("{name}: {a} -> {b}"));
                }
            }
        }
    }
    Ok(bad)
}

pub fn check_monotonicity() -> Outcome {
    let mut detail = Vec::new();
    let mut pass = true;
    for (gate, axis, values) in monotonicity_sweeps() {
        let bad = increasing_columns(&Scenario::new(gate), axis, &values)?;
        pass &= bad.is_empty();
        detail.push(format!(
            "{gate:?} {axis}: {}",
            if bad.is_empty() { "ok".into() } else { bad.join(", ") }
        ));
    }
    Ok((pass, detail.join("; ")))
}

fn timed(name: &str, f: impl FnOnce() -> Outcome) -> Check {
    let t = Instant::now();
    let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    Check {
        name: name.into(),
        pass,
        detail,
        seconds: t.elapsed().as_secs_f64(),
    }
}

/// Run the oracle and invariant suites.
pub fn verify(opts: &VerifyOptions) -> VerifySummary {
    let n = if opts.quick { 10 } else { 100 };
    let mut checks = Vec::new();
    for gate in GateKind::ALL {
        checks.push(timed(&format!("correction-table/{}", gate_slug(gate)), || {
            check_correction_table(gate, n)
        }));
    }
    for gate in GateKind::ALL {
        checks.push(timed(&format!("printed-table/{}", gate_slug(gate)), || {
            check_printed_table(gate, &opts.assets_dir)
        }));
    }
    checks.push(timed("parallelism-terms", check_parallelism_terms));
    checks.push(timed("cluster-preparation", check_cluster));
    checks.push(timed("hyper-resources", check_hyper_resources));
    checks.push(timed("zero-noise-consistency", check_zero_noise));
    checks.push(timed("metric-arithmetic", check_metric_arithmetic));
    checks.push(timed("correction-comparison", check_correction_comparison));
    checks.push(timed("partial-bsm", check_partial_bsm));
    checks.push(timed("shot-reproducibility", check_reproducibility));
    checks.push(timed("bound-soundness", || check_bound_soundness(n)));
    if !opts.quick {
        checks.push(timed("monotonicity", check_monotonicity));
    }
    VerifySummary { checks }
}

fn gate_slug(g: GateKind) -> &'static str {
    match g {
        GateKind::Cnot => "cnot",
        GateKind::Cphase => "cphase",
    }
}
