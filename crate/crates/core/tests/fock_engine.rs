use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use telegate::fock::{
    post_select, to_qubits, DetectionPattern, DetectorModel, FockState, ModeRegistry, OpticalElement, Polarization,
    QubitEncoding, Source, SourceConfig,
};
use telegate::qubit::QubitState;
use telegate::{BellKind, C64};

/// Naive permanent over all permutations; fine for n ≤ 7.
fn permanent(m: &DMatrix<C64>) -> C64 {
    fn rec(m: &DMatrix<C64>, row: usize, used: &mut Vec<bool>) -> C64 {
        if row == m.nrows() {
            return C64::new(1.0, 0.0);
        }
        let mut s = C64::new(0.0, 0.0);
        for c in 0..m.ncols() {
            if !used[c] {
                used[c] = true;
                s += m[(row, c)] * rec(m, row + 1, used);
                used[c] = false;
            }
        }
        s
    }
    rec(m, 0, &mut vec![false; m.ncols()])
}

fn factorial_weight(modes: &[u16]) -> f64 {
    let mut counts = std::collections::BTreeMap::new();
    for &m in modes {
        *counts.entry(m).or_insert(0u32) += 1;
    }
    counts
        .values()
        .map(|&n| (1..=n).map(f64::from).product::<f64>())
        .product()
}

/// Transition amplitude `⟨out|Û|in⟩ = Perm(U[out, in]) / √(Π n_in! Π n_out!)`.
fn oracle_amplitude(u: &DMatrix<C64>, input: &[u16], output: &[u16]) -> C64 {
    let sub = DMatrix::from_fn(output.len(), input.len(), |i, j| {
        u[(output[i] as usize, input[j] as usize)]
    });
    permanent(&sub) / (factorial_weight(input) * factorial_weight(output)).sqrt()
}

fn registry() -> Arc<ModeRegistry> {
    Arc::new(ModeRegistry::new(["a", "b", "c"], 1).unwrap())
}

fn network() -> Vec<OpticalElement> {
    vec![
        OpticalElement::ppbs("a", "b", 1.0, 1.0 / 3.0),
        OpticalElement::hwp("b", 22.5),
        OpticalElement::pbs("b", "c"),
        OpticalElement::qwp("c", 30.0),
        OpticalElement::beamsplitter("a", "c", 0.3),
        OpticalElement::phase("a", Some(Polarization::V), 1.1),
    ]
}

fn network_matrix(reg: &ModeRegistry) -> DMatrix<C64> {
    network()
        .iter()
        .fold(DMatrix::identity(reg.len(), reg.len()), |acc, e| {
            e.mode_matrix(reg).unwrap() * acc
        })
}

/// All sorted photon lists of `n` photons over `modes` modes.
fn multisets(n: usize, modes: u16) -> Vec<Vec<u16>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in multisets(n - 1, modes) {
        let lo = rest.last().copied().unwrap_or(0);
        for m in lo..modes {
            let mut v = rest.clone();
            v.push(m);
            out.push(v);
        }
    }
    out
}

#[test]
fn engine_matches_permanent_oracle() {
    let reg = registry();
    let u = network_matrix(&reg);
    for input in [vec![0u16, 3], vec![1, 1, 4], vec![0, 2, 3, 5], vec![2, 2, 2]] {
        let s = FockState::from_terms(reg.clone(), [(input.clone(), C64::new(1.0, 0.0))]).unwrap();
        let out = s.apply_all(&network()).unwrap();
        for output in multisets(input.len(), reg.len() as u16) {
            let expect = oracle_amplitude(&u, &input, &output);
            let got = out.amplitude(&output);
            assert!(
                (got - expect).norm() < 1e-12,
                "in {input:?} out {output:?}: {got} vs {expect}"
            );
        }
    }
}

#[test]
fn ppbs_single_photon_and_vv_coincidence() {
    let reg = Arc::new(ModeRegistry::new(["4", "6"], 1).unwrap());
    let h4 = reg.mode_index("4", Polarization::H, 0).unwrap();
    let v4 = reg.mode_index("4", Polarization::V, 0).unwrap();
    let v6 = reg.mode_index("6", Polarization::V, 0).unwrap();
    let ppbs = OpticalElement::ppbs("4", "6", 1.0, 1.0 / 3.0);

    let h = FockState::from_terms(reg.clone(), [(vec![h4], C64::new(1.0, 0.0))]).unwrap();
    assert!((h.apply(&ppbs).unwrap().amplitude(&[h4]) - C64::new(1.0, 0.0)).norm() < 1e-15);

    let vv = FockState::from_terms(reg, [(vec![v4, v6], C64::new(1.0, 0.0))]).unwrap();
    let out = vv.apply(&ppbs).unwrap();
    assert!((out.amplitude(&[v4, v6]) - C64::new(-1.0 / 3.0, 0.0)).norm() < 1e-15);
}

/// Two-photon oracle on a 50:50 splitter with wavepacket overlap `v`:
/// P(coincidence) = (1 − |⟨w₁|w₂⟩|²)/2.
fn hom_coincidence(v: f64) -> f64 {
    let reg = Arc::new(ModeRegistry::new(["a", "b"], 2).unwrap());
    let mut cfg = SourceConfig::new(vec![
        Source::single("a", telegate::qubit::NamedQubit::H),
        Source::single("b", telegate::qubit::NamedQubit::H),
    ]);
    cfg.set_internal_overlap(0, 1, v).unwrap();
    let s = cfg.emit(&reg, &[1, 1]).unwrap();
    let out = s.apply(&OpticalElement::beamsplitter("a", "b", 0.5)).unwrap();
    post_select(&out, &DetectionPattern::paths(["a", "b"], DetectorModel::Threshold))
        .unwrap()
        .probability
}

#[test]
fn hong_ou_mandel_visibility_tracks_overlap() {
    assert!(hom_coincidence(1.0) < 1e-28);
    assert!((hom_coincidence(0.0) - 0.5).abs() < 1e-14);
    assert!((hom_coincidence(0.9) - 0.05).abs() < 1e-14);
    for v in [0.1, 0.37, 0.75] {
        assert!((hom_coincidence(v) - (1.0 - v) / 2.0).abs() < 1e-14);
    }
}

#[test]
fn distinguishable_pair_decoheres_after_interference() {
    // Φ⁺ on (a, b) with photon b given overlap 0 against a reference single
    // photon: the Bell pair itself stays coherent, internal labels are local.
    let reg = Arc::new(ModeRegistry::new(["a", "b"], 2).unwrap());
    let cfg = SourceConfig::new(vec![Source::bell(BellKind::PhiPlus, "a", "b")]);
    let s = cfg.emit(&reg, &[1]).unwrap();
    let q = to_qubits(
        &s,
        &[
            QubitEncoding::polarization("a", "a"),
            QubitEncoding::polarization("b", "b"),
        ],
    )
    .unwrap();
    assert!(q.is_pure());

    // a single photon in a superposition of internal modes 0 and 1 with
    // orthogonal polarizations is a classical mixture of H and V
    let h0 = reg.mode_index("a", Polarization::H, 0).unwrap();
    let v1 = reg.mode_index("a", Polarization::V, 1).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let m = FockState::from_terms(reg, [(vec![h0], C64::new(r, 0.0)), (vec![v1], C64::new(r, 0.0))]).unwrap();
    match to_qubits(&m, &[QubitEncoding::polarization("q", "a")]).unwrap() {
        QubitState::Mixed(rho) => assert!(rho.matrix()[(0, 1)].norm() < 1e-15),
        QubitState::Pure(_) => panic!("expected a mixture"),
    }
}

fn arb_element() -> impl Strategy<Value = OpticalElement> {
    let path = prop_oneof![Just("a"), Just("b"), Just("c")];
    let pair = prop_oneof![Just(("a", "b")), Just(("b", "c")), Just(("a", "c")), Just(("c", "a"))];
    prop_oneof![
        (pair.clone(), 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|((a, b), th, tv)| OpticalElement::ppbs(a, b, th, tv)),
        pair.clone().prop_map(|(a, b)| OpticalElement::pbs(a, b)),
        pair.prop_map(|(a, b)| OpticalElement::swap(a, b)),
        (path.clone(), -90.0..90.0f64).prop_map(|(p, t)| OpticalElement::hwp(p, t)),
        (path.clone(), -90.0..90.0f64).prop_map(|(p, t)| OpticalElement::qwp(p, t)),
        (path, -3.2..3.2f64).prop_map(|(p, phi)| OpticalElement::phase(p, None, phi)),
    ]
}

fn arb_state() -> impl Strategy<Value = Vec<(Vec<u16>, (f64, f64))>> {
    (2usize..=8).prop_flat_map(|n| {
        prop::collection::vec((prop::collection::vec(0u16..6, n), (-1.0..1.0f64, -1.0..1.0f64)), 1..5)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_and_photon_number_conserved(
        terms in arb_state(),
        elements in prop::collection::vec(arb_element(), 1..6),
    ) {
        let reg = registry();
        let raw = FockState::from_terms(
            reg,
            terms.into_iter().map(|(k, (re, im))| (k, C64::new(re, im))),
        ).unwrap();
        prop_assume!(raw.norm_sqr() > 1e-6);
        let s = raw.normalized().unwrap().0;
        let n = s.photon_numbers();
        let out = s.apply_all(&elements).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
        prop_assert_eq!(out.photon_numbers(), n);
    }

    #[test]
    fn lossless_ppbs_is_identity(terms in arb_state()) {
        let reg = registry();
        let s = FockState::from_terms(reg, terms.into_iter().map(|(k, (re, im))| (k, C64::new(re, im)))).unwrap();
        let out = s.apply(&OpticalElement::ppbs("a", "c", 1.0, 1.0)).unwrap();
        prop_assert_eq!(out.len(), s.len());
        for (k, a) in s.terms() {
            prop_assert!((out.amplitude(k) - a).norm() < 1e-14);
        }
    }
}
