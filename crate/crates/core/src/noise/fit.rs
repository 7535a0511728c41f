use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::NoiseParams;
use crate::{Error, Result};

/// One grid point of a fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub params: NoiseParams,
    pub values: BTreeMap<String, f64>,
    /// `value − target` per target.
    pub residuals: BTreeMap<String, f64>,
    /// Sum of squared residuals.
    pub rss: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub targets: BTreeMap<String, f64>,
    /// Every grid point, in grid order.
    pub rows: Vec<FitRow>,
    /// Index of the row with the smallest `rss` (first on ties).
    pub best: usize,
}

impl FitReport {
    pub fn best_row(&self) -> &FitRow {
        &self.rows[self.best]
    }
}

/// Exhaustive grid search of `eval` against `targets`.
pub fn fit_report<F>(targets: &BTreeMap<String, f64>, grid: &[NoiseParams], eval: F) -> Result<FitReport>
where
    F: Fn(&NoiseParams) -> Result<BTreeMap<String, f64>> + Sync,
{
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty fit grid".into()));
    }
    if targets.is_empty() {
        return Err(Error::InvalidParameter("no fit targets".into()));
    }
    let rows = grid
        .par_iter()
        .map(|p| {
            p.validate()?;
            let values = eval(p)?;
            let mut residuals = BTreeMap::new();
            for (name, t) in targets {
                let v = values
                    .get(name)
                    .ok_or_else(|| Error::MissingEntry(format!("evaluator produced no `{name}`")))?;
                residuals.insert(name.clone(), v - t);
            }
            let rss = residuals.values().map(|r| r * r).sum();
            Ok(FitRow {
                params: p.clone(),
                values,
                residuals,
                rss,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = rows
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.rss.total_cmp(&b.1.rss))
        .map(|(i, _)| i)
        .expect("grid is non-empty");
    Ok(FitReport {
        targets: targets.clone(),
        rows,
        best,
    })
}

/// Cartesian product of `axes` over `base`. Axis names are
/// dotted paths into the serialized parameters, e.g. `overlap.bsm`.
pub fn param_grid(base: &NoiseParams, axes: &[(&str, Vec<f64>)]) -> Result<Vec<NoiseParams>> {
    let mut out = vec![serde_json::to_value(base).expect("params serialize")];
    for (path, values) in axes {
        let mut next = Vec::with_capacity(out.len() * values.len());
        for point in &out {
            for v in values {
                let mut p = point.clone();
                crate::scenario::set_path(&mut p, path, serde_json::json!(v))?;
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|v| serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string())))
        .collect()
}
