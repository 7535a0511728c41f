use proptest::prelude::*;
use telegate::noise::{
    draw, run_shots, tally, Distribution, NoiseParams, PhotonModel, QubitModel, ResourceSource, Setting,
};
use telegate::protocols::GateKind;
use telegate::qubit::NamedQubit;
use telegate::{Basis, C64};

fn qubit_from(raw: (f64, f64, f64)) -> [C64; 2] {
    let (theta, phi, _) = raw;
    [C64::new(theta.cos(), 0.0), C64::from_polar(theta.sin(), phi)]
}

fn assert_same(a: &Distribution, b: &Distribution, tol: f64) {
    assert_eq!(a.records.len(), b.records.len());
    for ((ra, pa), (rb, pb)) in a.records.iter().zip(&b.records) {
        assert_eq!(ra, rb);
        assert!((pa - pb).abs() < tol, "{ra:?}: {pa} vs {pb}");
    }
    assert!((a.acceptance - b.acceptance).abs() < tol);
}

fn basis() -> impl Strategy<Value = Basis> {
    prop::sample::select(Basis::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Without photon-level noise, the Fock evaluation of the whole
    /// experiment reproduces the qubit model record by record.
    #[test]
    fn zero_noise_photon_matches_qubit(
        a in (0.0..3.2f64, 0.0..6.3f64, Just(0.0)),
        b in (0.0..3.2f64, 0.0..6.3f64, Just(0.0)),
        bases in [basis(), basis()],
    ) {
        let setting = Setting { inputs: [qubit_from(a), qubit_from(b)], bases };
        for gate in GateKind::ALL {
            let photon = PhotonModel::new(gate, NoiseParams::ideal(), true).unwrap().distribution(&setting).unwrap();
            let qubit = QubitModel::new(gate, &NoiseParams::ideal(), None, true, ResourceSource::Optical)
                .unwrap()
                .distribution(&setting)
                .unwrap();
            assert_same(&photon, &qubit, 1e-12);
        }
    }
}

#[test]
fn drift_and_resource_noise_agree_where_qubit_model_is_exact() {
    let setting = Setting::named(NamedQubit::Plus, NamedQubit::R, [Basis::X, Basis::Y]);
    let mut cphase = NoiseParams::ideal();
    cphase.overlap.resource = 0.7;
    cphase.phase_drift = 0.6;
    cphase.sagnac_drift = true;
    let mut cnot = NoiseParams::ideal();
    cnot.phase_drift = 0.5;
    cnot.ppbs_ports = Some([
        telegate::protocols::PpbsParams { t_h: 0.95, t_v: 0.3 },
        telegate::protocols::PpbsParams { t_h: 0.96, t_v: 0.35 },
    ]);
    for (gate, noise) in [(GateKind::Cphase, cphase), (GateKind::Cnot, cnot)] {
        assert!(QubitModel::is_exact_for(gate, &noise));
        let photon = PhotonModel::new(gate, noise.clone(), true)
            .unwrap()
            .distribution(&setting)
            .unwrap();
        let qubit = QubitModel::new(gate, &noise, None, true, ResourceSource::Optical)
            .unwrap()
            .distribution(&setting)
            .unwrap();
        assert_same(&photon, &qubit, 1e-12);
    }
}

#[test]
fn double_pairs_contaminate_cnot_truth_table() {
    let setting = Setting::named(NamedQubit::V, NamedQubit::V, [Basis::Z, Basis::Z]);
    let mut noise = NoiseParams::ideal();
    noise.p2 = 0.05;
    let d = PhotonModel::new(GateKind::Cnot, noise, true)
        .unwrap()
        .distribution(&setting)
        .unwrap();
    // |VV⟩ → |HV⟩
    let p = d.conditional_bits().unwrap()[1];
    assert!(p < 1.0 - 1e-4, "{p}");
    assert!(d.truncated > 0.0);
}

#[test]
fn ideal_shots_have_no_wrong_outcomes() {
    let setting = Setting::named(NamedQubit::H, NamedQubit::V, [Basis::Z, Basis::Z]);
    let model = PhotonModel::new(GateKind::Cnot, NoiseParams::ideal(), true).unwrap();
    let h = model.harmonics(&setting).unwrap();
    let r = run_shots(&h, 0.0, 0.0, 400_000, 3).unwrap();
    assert!(r.accepted >= 10_000);
    let p = r.conditional_bits().unwrap();
    assert_eq!(p[3].value, 1.0);
    let acc = r.acceptance();
    assert!((acc.value - 1.0 / 36.0).abs() < 3.0 * acc.sd);
}

#[test]
fn sampled_drift_converges_to_the_exact_average() {
    let setting = Setting::named(NamedQubit::Plus, NamedQubit::Plus, [Basis::X, Basis::Z]);
    let mut noise = NoiseParams::ideal();
    noise.phase_drift = 0.8;
    noise.p2 = 0.05;
    let model = PhotonModel::new(GateKind::Cnot, noise.clone(), true).unwrap();
    let h = model.harmonics(&setting).unwrap();
    let exact = h.averaged(noise.phase_drift);
    let shots = 2_000_000;
    let r = run_shots(&h, noise.p2, noise.phase_drift, shots, 17).unwrap();
    for (rec, p) in &exact.records {
        let k = r.count(rec) as f64;
        let sd = (p * (1.0 - p) / shots as f64).sqrt();
        assert!(
            (k / shots as f64 - p).abs() < 4.0 * sd.max(1e-9),
            "{rec:?}: {} vs {p}",
            k / shots as f64
        );
    }
    let sd = (exact.truncated * (1.0 - exact.truncated) / shots as f64).sqrt();
    assert!((r.truncated as f64 / shots as f64 - exact.truncated).abs() < 4.0 * sd);
}

#[test]
fn shots_are_reproducible_across_thread_counts() {
    let setting = Setting::named(NamedQubit::Plus, NamedQubit::Minus, [Basis::Y, Basis::Y]);
    let mut noise = NoiseParams::ideal();
    noise.phase_drift = 0.3;
    noise.sagnac_drift = true;
    noise.p2 = 0.02;
    let h = PhotonModel::new(GateKind::Cphase, noise.clone(), true)
        .unwrap()
        .harmonics(&setting)
        .unwrap();
    let run = || run_shots(&h, noise.p2, noise.phase_drift, 50_000, 99).unwrap();
    let a = run();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(run);
    let c = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap()
        .install(run);
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_ne!(a, run_shots(&h, noise.p2, noise.phase_drift, 50_000, 100).unwrap());
}

/// Repeated small experiments: the acceptance frequency lands within 4σ of
/// the exact value in at least 999 of 1000 runs.
#[test]
fn sampled_frequencies_are_statistically_sound() {
    let setting = Setting::named(NamedQubit::H, NamedQubit::Plus, [Basis::Z, Basis::X]);
    let d = PhotonModel::new(GateKind::Cphase, NoiseParams::ideal(), true)
        .unwrap()
        .distribution(&setting)
        .unwrap();
    let probs: Vec<f64> = d.records.iter().map(|(_, p)| *p).collect();
    let n = 200u64;
    let p = d.acceptance;
    let sd = (p * (1.0 - p) / n as f64).sqrt();
    let inside = (0..1000u64)
        .filter(|&seed| {
            let (k, _, _) = tally(probs.len(), n, seed, 0, |rng| draw(&probs, rng));
            let f = k.iter().sum::<u64>() as f64 / n as f64;
            (f - p).abs() <= 4.0 * sd
        })
        .count();
    assert!(inside >= 999, "{inside}");
}
