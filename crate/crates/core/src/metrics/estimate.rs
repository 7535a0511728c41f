use std::fmt;

use serde::{Deserialize, Serialize};

/// A value with its ±1 standard deviation. Exact results carry `sd = 0`.
/// Deserializes from `{"value", "sd"}` or from a bare number (exact).
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "EstimateRepr")]
pub struct Estimate {
    pub value: f64,
    pub sd: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EstimateRepr {
    Exact(f64),
    Full { value: f64, sd: f64 },
}

impl From<EstimateRepr> for Estimate {
    fn from(r: EstimateRepr) -> Self {
        match r {
            EstimateRepr::Exact(value) => Estimate::exact(value),
            EstimateRepr::Full { value, sd } => Estimate { value, sd },
        }
    }
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, sd: 0.0 }
    }

    pub fn new(value: f64, sd: f64) -> Self {
        Estimate { value, sd }
    }

    /// Frequency `k/n` with binomial s.d. `√(p(1−p)/n)`.
    pub fn binomial(k: u64, n: u64) -> Self {
        if n == 0 {
            return Estimate {
                value: f64::NAN,
                sd: f64::NAN,
            };
        }
        let p = k as f64 / n as f64;
        Estimate {
            value: p,
            sd: (p * (1.0 - p) / n as f64).sqrt(),
        }
    }

    /// First-order propagation through `Σ cᵢ xᵢ + offset` of independent
    /// estimates.
    pub fn linear(terms: &[(f64, Estimate)], offset: f64) -> Self {
        let value = terms.iter().map(|(c, e)| c * e.value).sum::<f64>() + offset;
        let var: f64 = terms.iter().map(|(c, e)| (c * e.sd).powi(2)).sum();
        Estimate { value, sd: var.sqrt() }
    }

    /// Mean of independent estimates.
    pub fn mean(items: &[Estimate]) -> Self {
        let c = 1.0 / items.len() as f64;
        Estimate::linear(&items.iter().map(|e| (c, *e)).collect::<Vec<_>>(), 0.0)
    }

    /// `min(a, b)` carrying the error of the smaller one.
    pub fn min(self, other: Estimate) -> Self {
        if self.value <= other.value {
            self
        } else {
            other
        }
    }

    /// Number of standard deviations by which `value` exceeds `bound`.
    pub fn sigmas_above(&self, bound: f64) -> f64 {
        if self.sd > 0.0 {
            (self.value - bound) / self.sd
        } else if self.value > bound {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sd > 0.0 {
            write!(f, "{:.4} ± {:.4}", self.value, self.sd)
        } else {
            write!(f, "{:.6}", self.value)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_sd() {
        let e = Estimate::binomial(25, 100);
        assert_eq!(e.value, 0.25);
        assert!((e.sd - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        assert_eq!(Estimate::binomial(10, 10).sd, 0.0);
    }

    #[test]
    fn linear_propagation() {
        let a = Estimate::new(0.79, 0.02);
        let b = Estimate::new(0.82, 0.02);
        let lower = Estimate::linear(&[(1.0, a), (1.0, b)], -1.0);
        assert!((lower.value - 0.61).abs() < 1e-12);
        assert!((lower.sd - 0.02 * 2f64.sqrt()).abs() < 1e-12);
    }
}
