use std::io::Write;

use rayon::prelude::*;
use serde_json::Value;

use super::config::Scenario;
use super::path::set_path;
use super::run::{run, RunReport};
use crate::metrics::Estimate;
use crate::{Error, Result};

/// Fixed CSV header of a sweep table.
pub const SWEEP_COLUMNS: [&str; 30] = [
    "parameter",
    "value",
    "model",
    "status",
    "acceptance",
    "acceptance_sd",
    "F_zz",
    "F_zz_sd",
    "F_zx",
    "F_zx_sd",
    "F_xz",
    "F_xz_sd",
    "F_xx",
    "F_xx_sd",
    "F_xx_circ",
    "F_xx_circ_sd",
    "entangling_fidelity",
    "entangling_fidelity_sd",
    "process_lower",
    "process_lower_sd",
    "process_upper",
    "process_upper_sd",
    "concurrence_bound",
    "concurrence_bound_sd",
    "parallelism_average",
    "parallelism_average_sd",
    "process_fidelity",
    "corrected_average",
    "resource_probability",
    "resource_fidelity",
];

/// Columns holding fidelities of the gate or resource.
pub const FIDELITY_COLUMNS: [&str; 9] = [
    "F_zz",
    "F_zx",
    "F_xz",
    "F_xx",
    "F_xx_circ",
    "entangling_fidelity",
    "process_fidelity",
    "corrected_average",
    "resource_fidelity",
];

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub value: Value,
    pub report: RunReport,
}

impl SweepPoint {
    /// Cells in [`SWEEP_COLUMNS`] order; missing metrics are `None`.
    pub fn cells(&self, axis: &str) -> Vec<Option<String>> {
        let r = &self.report;
        let m = &r.metrics;
        let num = |v: f64| Some(v.to_string());
        let est = |e: Option<Estimate>| [e.and_then(|e| num(e.value)), e.and_then(|e| num(e.sd))];
        let acceptance = if r.settings.is_empty() {
            m.resource.as_ref().and_then(|x| x.probability).map(Estimate::exact)
        } else {
            Some(Estimate::mean(
                &r.settings.iter().map(|s| s.acceptance).collect::<Vec<_>>(),
            ))
        };
        let mut row = vec![
            Some(axis.to_string()),
            Some(match &self.value {
                Value::String(s) => s.clone(),
                v => v.to_string(),
            }),
            Some(
                serde_json::to_value(r.model)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default(),
            ),
            Some(
                serde_json::to_value(r.status)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default(),
            ),
        ];
        row.extend(est(acceptance));
        for sym in ["F_zz", "F_zx", "F_xz", "F_xx", "F_xx_circ"] {
            row.extend(est(m.classical.get(sym).copied()));
        }
        row.extend(est(m.entangling.as_ref().map(|e| e.fidelity)));
        row.extend(est(m.bounds.as_ref().map(|b| b.process.lower)));
        row.extend(est(m.bounds.as_ref().map(|b| b.process.upper)));
        row.extend(est(m.bounds.as_ref().map(|b| b.concurrence)));
        row.extend(est(m.parallelism.as_ref().map(|p| p.value)));
        row.push(m.process.as_ref().and_then(|p| num(p.fidelity)));
        row.push(m.corrections.as_ref().and_then(|c| num(c.corrected_average)));
        row.push(m.resource.as_ref().and_then(|x| x.probability).and_then(num));
        row.push(m.resource.as_ref().and_then(|x| num(x.fidelity.value)));
        debug_assert_eq!(row.len(), SWEEP_COLUMNS.len());
        row
    }
}

/// Run `base` once per value of the dotted parameter `axis`. Points run in
/// parallel; the result keeps the order of `values`.
pub fn sweep(base: &Scenario, axis: &str, values: &[Value]) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one value".into()));
    }
    let root = serde_json::to_value(base).map_err(|e| Error::Parse(e.to_string()))?;
    let scenarios = values
        .iter()
        .map(|v| {
            let mut doc = root.clone();
            set_path(&mut doc, axis, v.clone())?;
            Scenario::from_value(doc).map_err(|e| Error::Parse(format!("{axis} = {v}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    scenarios
        .par_iter()
        .zip(values)
        .map(|(s, v)| {
            Ok(SweepPoint {
                value: v.clone(),
                report: run(s)?,
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(out: W, axis: &str, points: &[SweepPoint]) -> Result<()> {
    let io = |e: csv::Error| Error::Protocol(format!("writing csv: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS).map_err(io)?;
    for p in points {
        w.write_record(p.cells(axis).into_iter().map(|c| c.unwrap_or_default()))
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Protocol(format!("writing csv: {e}")))
}

/// Column `name` of a sweep, one entry per point.
pub fn column(points: &[SweepPoint], axis: &str, name: &str) -> Option<Vec<Option<f64>>> {
    let i = SWEEP_COLUMNS.iter().position(|c| *c == name)?;
    Some(
        points
            .iter()
            .map(|p| p.cells(axis)[i].as_ref().and_then(|s| s.parse().ok()))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::GateChoice;

    #[test]
    fn single_value_sweep_is_a_run() {
        let base = Scenario::new(GateChoice::Cphase);
        let pts = sweep(&base, "noise.overlap.resource", &[Value::from(0.9)]).unwrap();
        let mut s = base.clone();
        s.noise.overlap.resource = 0.9;
        assert_eq!(pts[0].report, run(&s).unwrap());
        let mut buf = Vec::new();
        write_csv(&mut buf, "noise.overlap.resource", &pts).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("parameter,value,model,status,acceptance,"));
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn unknown_axis_is_rejected() {
        let base = Scenario::new(GateChoice::Cnot);
        assert!(sweep(&base, "noise.colour", &[Value::from(1.0)]).is_err());
    }
}
