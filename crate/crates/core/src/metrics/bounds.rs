use serde::{Deserialize, Serialize};

use super::Estimate;
use crate::{Error, Result};

const RANGE_TOL: f64 = 1e-12;

fn check_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if v.is_finite() && v >= lo - RANGE_TOL && v <= hi + RANGE_TOL {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} outside [{lo}, {hi}]")))
    }
}

/// `⟨AB⟩ = P₀₀ − P₀₁ − P₁₀ + P₁₁` from conditional outcome probabilities.
/// With `accepted` counts the s.d. is the multinomial `√((1 − E²)/n)`.
pub fn correlation(bits: &[Estimate; 4], accepted: Option<u64>) -> Estimate {
    let value = bits[0].value - bits[1].value - bits[2].value + bits[3].value;
    let sd = accepted
        .map(|n| ((1.0 - value * value).max(0.0) / n as f64).sqrt())
        .unwrap_or(0.0);
    Estimate { value, sd }
}

/// `F = (1 + ⟨XX⟩ − ⟨YY⟩ + ⟨ZZ⟩)/4` with `Φ⁺`.
pub fn phi_plus_fidelity_from_correlations(xx: Estimate, yy: Estimate, zz: Estimate) -> Result<Estimate> {
    for (n, e) in [("xx", xx), ("yy", yy), ("zz", zz)] {
        check_range(n, e.value, -1.0, 1.0)?;
    }
    Ok(Estimate::linear(&[(0.25, xx), (-0.25, yy), (0.25, zz)], 0.25))
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessBounds {
    /// `F₁ + F₂ − 1`, not clamped at zero.
    pub lower: Estimate,
    /// `min(F₁, F₂)`.
    pub upper: Estimate,
}

impl ProcessBounds {
    pub fn contains(&self, f: f64, tol: f64) -> bool {
        f >= self.lower.value - tol && f <= self.upper.value + tol
    }
}

pub fn process_fidelity_bounds(f1: Estimate, f2: Estimate) -> Result<ProcessBounds> {
    check_range("f1", f1.value, 0.0, 1.0)?;
    check_range("f2", f2.value, 0.0, 1.0)?;
    Ok(ProcessBounds {
        lower: Estimate::linear(&[(1.0, f1), (1.0, f2)], -1.0),
        upper: f1.min(f2),
    })
}

/// `C ≥ 2(F₁ + F₂) − 3`, reported raw (may be negative).
pub fn concurrence_lower_bound(f1: Estimate, f2: Estimate) -> Result<Estimate> {
    check_range("f1", f1.value, 0.0, 1.0)?;
    check_range("f2", f2.value, 0.0, 1.0)?;
    Ok(Estimate::linear(&[(2.0, f1), (2.0, f2)], -3.0))
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub value: Estimate,
    pub threshold: f64,
    /// Strictly above the threshold.
    pub pass: bool,
    pub margin: f64,
    /// Margin in standard deviations, when the value has an error bar.
    pub sigmas: Option<f64>,
}

impl CriterionResult {
    fn strict(value: Estimate, threshold: f64) -> Self {
        CriterionResult {
            value,
            threshold,
            pass: value.value > threshold,
            margin: value.value - threshold,
            sigmas: (value.sd > 0.0).then(|| value.sigmas_above(threshold)),
        }
    }
}

/// Average of the three conditional fidelities against the local bound 2/3.
pub fn parallelism_criterion(f_zx: Estimate, f_xz: Estimate, f_xx: Estimate) -> Result<CriterionResult> {
    for (n, e) in [("f_zx", f_zx), ("f_xz", f_xz), ("f_xx", f_xx)] {
        check_range(n, e.value, 0.0, 1.0)?;
    }
    Ok(CriterionResult::strict(Estimate::mean(&[f_zx, f_xz, f_xx]), 2.0 / 3.0))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    TwoQubitBell,
    FourQubitCluster,
}

impl WitnessKind {
    /// Fidelity above which genuine multipartite entanglement is certified.
    pub fn threshold(self) -> f64 {
        match self {
            WitnessKind::TwoQubitBell | WitnessKind::FourQubitCluster => 0.5,
        }
    }
}

pub fn entanglement_witness(fidelity: Estimate, kind: WitnessKind) -> Result<CriterionResult> {
    check_range("fidelity", fidelity.value, 0.0, 1.0)?;
    Ok(CriterionResult::strict(fidelity, kind.threshold()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: f64) -> Estimate {
        Estimate::exact(v)
    }

    #[test]
    fn measured_correlations() {
        let f = phi_plus_fidelity_from_correlations(e(0.462), e(-0.434), e(0.403)).unwrap();
        assert!((f.value - 0.57475).abs() < 1e-12);
        assert!(
            (phi_plus_fidelity_from_correlations(e(1.0), e(-1.0), e(1.0))
                .unwrap()
                .value
                - 1.0)
                .abs()
                < 1e-15
        );
        assert!(
            (phi_plus_fidelity_from_correlations(e(0.0), e(0.0), e(0.0))
                .unwrap()
                .value
                - 0.25)
                .abs()
                < 1e-15
        );
        assert!(phi_plus_fidelity_from_correlations(e(1.2), e(0.0), e(0.0)).is_err());
    }

    #[test]
    fn bounds_and_concurrence() {
        let b = process_fidelity_bounds(e(0.79), e(0.82)).unwrap();
        assert!((b.lower.value - 0.61).abs() < 1e-12);
        assert!((b.upper.value - 0.79).abs() < 1e-12);
        let h = process_fidelity_bounds(e(0.5), e(0.5)).unwrap();
        assert!(h.lower.value.abs() < 1e-15 && (h.upper.value - 0.5).abs() < 1e-15);
        assert!((concurrence_lower_bound(e(0.79), e(0.82)).unwrap().value - 0.22).abs() < 1e-12);
        assert!(concurrence_lower_bound(e(0.75), e(0.75)).unwrap().value.abs() < 1e-15);
        assert!((concurrence_lower_bound(e(1.0), e(1.0)).unwrap().value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn strict_thresholds() {
        let p = parallelism_criterion(e(0.79), e(0.82), e(0.81)).unwrap();
        assert!((p.value.value - 0.8066666666666666).abs() < 1e-12 && p.pass);
        let t = 2.0 / 3.0;
        assert!(!parallelism_criterion(e(t), e(t), e(t)).unwrap().pass);
        assert!(!entanglement_witness(e(0.5), WitnessKind::TwoQubitBell).unwrap().pass);
        let w = entanglement_witness(Estimate::new(0.71, 0.01), WitnessKind::FourQubitCluster).unwrap();
        assert!(w.pass && (w.margin - 0.21).abs() < 1e-12);
        assert!((w.sigmas.unwrap() - 21.0).abs() < 1e-9);
    }

    #[test]
    fn correlation_from_counts() {
        let c = correlation(
            &[
                Estimate::exact(0.5),
                Estimate::exact(0.0),
                Estimate::exact(0.0),
                Estimate::exact(0.5),
            ],
            Some(100),
        );
        assert_eq!(c.value, 1.0);
        assert_eq!(c.sd, 0.0);
    }
}
