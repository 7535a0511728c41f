use telegate::noise::{PhotonModel, QubitModel, ResourceSource};
use telegate::protocols::GateKind;
use telegate_bench::{noisy, resource_only};

#[test]
fn fixtures_fit_their_models() {
    for gate in GateKind::ALL {
        assert!(PhotonModel::new(gate, noisy(), true).is_ok());
        assert!(QubitModel::new(gate, &noisy(), None, true, ResourceSource::Optical).is_err());
        assert!(QubitModel::new(gate, &resource_only(), None, true, ResourceSource::Optical).is_ok());
        assert_eq!(
            QubitModel::is_exact_for(gate, &resource_only()),
            gate == GateKind::Cphase
        );
    }
}
