use serde::{Deserialize, Serialize};

use crate::fock::{ModeRegistry, OpticalElement, Polarization};
use crate::metrics::{Estimate, Pair};
use crate::noise::{NoiseParams, ResourceSource};
use crate::protocols::{BsmMode, GateKind, ResourceKind};
use crate::qubit::NamedQubit;
use crate::{Basis, BellKind, Error, Result, C64};

pub const SCENARIO_SCHEMA: &str = "telegate.scenario/v1";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateChoice {
    Cnot,
    Cphase,
    /// Resource preparation only, no gate.
    PrepOnly,
}

impl GateChoice {
    pub fn gate(self) -> Option<GateKind> {
        match self {
            GateChoice::Cnot => Some(GateKind::Cnot),
            GateChoice::Cphase => Some(GateKind::Cphase),
            GateChoice::PrepOnly => None,
        }
    }
}

/// Named resource states.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResourceName {
    #[serde(rename = "chi", alias = "χ")]
    Chi,
    #[serde(rename = "chi-prime", alias = "χ′", alias = "χ'")]
    ChiPrime,
    #[serde(rename = "lambda", alias = "λ")]
    Lambda,
}

impl ResourceName {
    pub fn kind(self) -> ResourceKind {
        match self {
            ResourceName::Chi => ResourceKind::ClusterChi,
            ResourceName::ChiPrime => ResourceKind::HyperChi,
            ResourceName::Lambda => ResourceKind::Lambda,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResourceOptions {
    pub source: ResourceSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<ResourceName>,
}

/// What to compute. An empty list selects the gate's default set.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    TruthTable,
    Entangling,
    Complementary,
    Parallelism,
    Corrections,
    Process,
    Resource,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelChoice {
    #[default]
    /// Qubit model where it is exact, photon model otherwise.
    Auto,
    Qubit,
    Photon,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Exact,
    Shots(u64),
}

/// Wave plates applied to `|H⟩`, half-wave first. Angles in degrees.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavePlates {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hwp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qwp: Option<f64>,
}

impl WavePlates {
    pub fn amplitudes(&self) -> Result<[C64; 2]> {
        let reg = ModeRegistry::new(["in"], 1)?;
        let h = reg.mode_index("in", Polarization::H, 0)? as usize;
        let v = reg.mode_index("in", Polarization::V, 0)? as usize;
        let mut out = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let plates = [
            self.hwp.map(|a| OpticalElement::hwp("in", a)),
            self.qwp.map(|a| OpticalElement::qwp("in", a)),
        ];
        for e in plates.into_iter().flatten() {
            let m = e.mode_matrix(&reg)?;
            out = [
                m[(h, h)] * out[0] + m[(h, v)] * out[1],
                m[(v, h)] * out[0] + m[(v, v)] * out[1],
            ];
        }
        Ok(out)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QubitInput {
    Named(NamedQubit),
    Plates(WavePlates),
}

impl QubitInput {
    pub fn amplitudes(&self) -> Result<[C64; 2]> {
        match self {
            QubitInput::Named(q) => Ok(q.amplitudes()),
            QubitInput::Plates(p) => p.amplitudes(),
        }
    }

    fn label(&self) -> String {
        match self {
            QubitInput::Named(q) => q.symbol().to_string(),
            QubitInput::Plates(p) => {
                let mut s = String::new();
                if let Some(a) = p.hwp {
                    s += &format!("hwp({a})");
                }
                if let Some(a) = p.qwp {
                    s += &format!("qwp({a})");
                }
                if s.is_empty() {
                    s.push('H');
                }
                s
            }
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputState {
    Product([QubitInput; 2]),
    Bell(BellKind),
}

impl InputState {
    pub fn label(&self) -> String {
        match self {
            InputState::Product([a, b]) => format!("{},{}", a.label(), b.label()),
            InputState::Bell(k) => k.symbol().to_string(),
        }
    }

    /// Both inputs named single-qubit states.
    pub fn named_pair(&self) -> Option<Pair> {
        match self {
            InputState::Product([QubitInput::Named(a), QubitInput::Named(b)]) => Some([*a, *b]),
            _ => None,
        }
    }
}

/// A custom analysis setting.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSetting {
    pub state: InputState,
    pub bases: [Basis; 2],
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Correlations {
    pub xx: Estimate,
    pub yy: Estimate,
    pub zz: Estimate,
}

/// Measured values to evaluate instead of simulating.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Replay {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth_table: Option<Estimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zx: Option<Estimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xz: Option<Estimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xx: Option<Estimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallelism: Option<Estimate>,
    /// `⟨XX⟩, ⟨YY⟩, ⟨ZZ⟩` of the entangling output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlations: Option<Correlations>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resource_fidelity: Option<Estimate>,
}

fn schema_tag() -> String {
    SCENARIO_SCHEMA.to_string()
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "schema_tag")]
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub gate: GateChoice,
    #[serde(default)]
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub inputs: Vec<InputSetting>,
    #[serde(default)]
    pub resource: ResourceOptions,
    #[serde(default)]
    pub noise: NoiseParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bsm: Option<BsmMode>,
    #[serde(default = "yes")]
    pub corrections: bool,
    #[serde(default)]
    pub model: ModelChoice,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replay: Option<Replay>,
}

/// 1-based line and column of the first occurrence of `"key"`.
fn locate(text: &str, key: &str) -> Option<(usize, usize)> {
    let needle = format!("\"{key}\"");
    let at = text.find(&needle)?;
    let before = &text[..at];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Some((line, col))
}

impl Scenario {
    pub fn new(gate: GateChoice) -> Self {
        Scenario {
            schema: schema_tag(),
            name: None,
            gate,
            analyses: Vec::new(),
            inputs: Vec::new(),
            resource: ResourceOptions::default(),
            noise: NoiseParams::default(),
            bsm: None,
            corrections: true,
            model: ModelChoice::Auto,
            mode: Mode::Exact,
            seed: None,
            replay: None,
        }
    }

    /// Parse and validate. Errors carry the line and column they refer to.
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            let msg = msg.strip_suffix(&suffix).unwrap_or(&msg);
            Error::Parse(format!("line {}, column {}: {msg}", e.line(), e.column()))
        })?;
        s.validate().map_err(|(key, e)| match locate(text, key) {
            Some((l, c)) => Error::Parse(format!("line {l}, column {c}: {key}: {e}")),
            None => Error::Parse(format!("{key}: {e}")),
        })?;
        Ok(s)
    }

    pub fn from_value(v: serde_json::Value) -> Result<Self> {
        let s: Scenario = serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))?;
        s.validate().map_err(|(key, e)| Error::Parse(format!("{key}: {e}")))?;
        Ok(s)
    }

    /// Semantic checks; the error names the offending top-level key.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if self.schema != SCENARIO_SCHEMA {
            return Err(("schema", format!("expected `{SCENARIO_SCHEMA}`, got `{}`", self.schema)));
        }
        self.noise.validate().map_err(|e| ("noise", e.to_string()))?;
        match self.mode {
            Mode::Shots(0) => return Err(("mode", "shots must be at least 1".into())),
            Mode::Shots(_) if self.seed.is_none() => return Err(("mode", "a seed is required for shots".into())),
            _ => {}
        }
        for s in &self.inputs {
            if let InputState::Product(q) = &s.state {
                for q in q {
                    q.amplitudes().map_err(|e| ("inputs", e.to_string()))?;
                }
            }
        }
        let analyses = self.analyses();
        match self.gate.gate() {
            None => {
                if self.resource.state.is_none() {
                    return Err(("resource", "prep-only needs a resource state".into()));
                }
                if let Some(a) = analyses.iter().find(|a| **a != Analysis::Resource) {
                    return Err(("analyses", format!("{a:?} needs a gate")));
                }
                if !self.inputs.is_empty() {
                    return Err(("inputs", "prep-only takes no inputs".into()));
                }
                if self.noise.p2 > 0.0 || self.noise.phase_drift > 0.0 || self.noise.overlap.bsm < 1.0 {
                    return Err(("noise", "prep-only models overlap.resource and ppbs_ports only; p2 and phase_drift must be 0 and overlap.bsm 1".into()));
                }
                if self.mode != Mode::Exact && self.replay.is_none() {
                    return Err(("mode", "prep-only runs are exact".into()));
                }
            }
            Some(gate) => {
                if let Some(r) = self.resource.state {
                    if r.kind() != gate.resource_kind() {
                        return Err(("resource", format!("{r:?} is not the resource of the {}", gate.name())));
                    }
                }
                if analyses.contains(&Analysis::Parallelism) && gate != GateKind::Cphase {
                    return Err(("analyses", "the parallelism criterion applies to the C-Phase".into()));
                }
                if self.replay.is_none() {
                    let photon = self.uses_photon_model();
                    if photon && self.model == ModelChoice::Qubit {
                        return Err(("model", "these noise parameters need the photon model".into()));
                    }
                    if photon {
                        if self.resource.source == ResourceSource::Ideal {
                            return Err(("resource", "the photon model prepares the resource optically".into()));
                        }
                        if self.bsm.is_some_and(|b| b != gate.default_bsm()) {
                            return Err(("bsm", "the photon model uses the optical analyzers".into()));
                        }
                        if let Some(a) = analyses
                            .iter()
                            .find(|a| matches!(a, Analysis::Corrections | Analysis::Process))
                        {
                            return Err(("analyses", format!("{a:?} needs the qubit model")));
                        }
                        if self.inputs.iter().any(|s| matches!(s.state, InputState::Bell(_))) {
                            return Err(("inputs", "entangled inputs need the qubit model".into()));
                        }
                    } else if self.mode != Mode::Exact {
                        if let Some(a) = analyses
                            .iter()
                            .find(|a| matches!(a, Analysis::Corrections | Analysis::Process))
                        {
                            return Err(("analyses", format!("{a:?} is computed in exact mode only")));
                        }
                    }
                }
            }
        }
        if self.replay.is_some() && !self.inputs.is_empty() {
            return Err(("replay", "replay takes no inputs".into()));
        }
        Ok(())
    }

    /// Whether the run goes through the photon model.
    pub fn uses_photon_model(&self) -> bool {
        match (self.model, self.gate.gate()) {
            (_, None) => false,
            (ModelChoice::Photon, _) => true,
            (ModelChoice::Qubit, _) => false,
            (ModelChoice::Auto, Some(g)) => !crate::noise::QubitModel::is_exact_for(g, &self.noise),
        }
    }

    /// Requested analyses, or the default set for the gate and model.
    pub fn analyses(&self) -> Vec<Analysis> {
        if !self.analyses.is_empty() || !self.inputs.is_empty() {
            return self.analyses.clone();
        }
        let exact_qubit = self.replay.is_none() && !self.uses_photon_model() && self.mode == Mode::Exact;
        let mut a = match self.gate {
            GateChoice::PrepOnly => return vec![Analysis::Resource],
            GateChoice::Cnot => vec![Analysis::TruthTable, Analysis::Entangling, Analysis::Complementary],
            GateChoice::Cphase => vec![Analysis::Entangling, Analysis::Complementary, Analysis::Parallelism],
        };
        if exact_qubit {
            a.extend([Analysis::Corrections, Analysis::Process]);
        }
        a
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wave_plates_prepare_named_states() {
        let close = |a: [C64; 2], b: [C64; 2]| (a[0] - b[0]).norm() + (a[1] - b[1]).norm() < 1e-12;
        let p = WavePlates {
            hwp: Some(22.5),
            qwp: None,
        }
        .amplitudes()
        .unwrap();
        assert!(close(p, NamedQubit::Plus.amplitudes()));
        let v = WavePlates {
            hwp: Some(45.0),
            qwp: None,
        }
        .amplitudes()
        .unwrap();
        assert!(close(v, NamedQubit::V.amplitudes()));
        let h = WavePlates { hwp: None, qwp: None }.amplitudes().unwrap();
        assert!(close(h, NamedQubit::H.amplitudes()));
    }

    #[test]
    fn errors_point_at_their_line() {
        let text = "{\n  \"gate\": \"cnot\",\n  \"mode\": {\"shots\": 10}\n}";
        let e = Scenario::from_json(text).unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
        let e = Scenario::from_json("{\n  \"gate\": \"cnot\",\n  \"colour\": 1\n}")
            .unwrap_err()
            .to_string();
        assert!(e.contains("line 3"), "{e}");
    }

    #[test]
    fn defaults_follow_the_model() {
        let s = Scenario::new(GateChoice::Cphase);
        assert!(s.analyses().contains(&Analysis::Process));
        let mut n = Scenario::new(GateChoice::Cnot);
        n.noise.p2 = 0.01;
        assert!(n.uses_photon_model());
        assert!(!n.analyses().contains(&Analysis::Process));
    }
}
