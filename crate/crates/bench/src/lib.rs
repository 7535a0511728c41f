//! Shared inputs for the benchmarks in `benches/`.

use telegate::noise::{NoiseParams, Overlaps};

/// Every noise mechanism on; needs the photon model.
pub fn noisy() -> NoiseParams {
    NoiseParams {
        p2: 0.05,
        overlap: Overlaps {
            resource: 0.9,
            bsm: 0.95,
        },
        phase_drift: 0.05,
        ..NoiseParams::default()
    }
}

/// Resource distinguishability and drift only; accepted by the qubit model,
/// which is exact for it on the C-Phase.
pub fn resource_only() -> NoiseParams {
    NoiseParams {
        overlap: Overlaps {
            resource: 0.9,
            bsm: 1.0,
        },
        phase_drift: 0.05,
        ..NoiseParams::default()
    }
}
