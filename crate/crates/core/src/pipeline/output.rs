//! CSV and JSON emission.

use std::path::Path;

use serde_json::{json, Value};

use super::{BoundRow, OutputFormat, SweepReport};
use crate::error::{Error, Result};

/// CSV columns in order: the report fields first, diagnostics after.
pub const CSV_COLUMNS: &[&str] = &[
    "T",
    "Delta",
    "Omega",
    "S_final",
    "c_star",
    "h_l1",
    "hhat_l1",
    "pair_freq",
    "pair_time",
    "D",
    "M",
    "E",
    "E_ratio",
    "r1_bound",
    "dual_witness",
    "sinkhorn_primal",
    "sinkhorn_gap",
    "a_l1",
    "b_l1",
    "lemma2_residual",
    "lemma3_residual",
    "runtime_ms",
    "E_direct",
    "E_route_gap",
    "calibrated",
    "calibration_residual",
    "fhat_min",
    "lemma1_ratio_a",
    "lemma1_ratio_b",
    "hhat_path_residual",
    "h_l1_over_t",
    "mu_spill",
    "nu_spill",
    "ascent_monotone",
    "sinkhorn_converged",
    "sinkhorn_iterations",
];

fn cell(v: &Value) -> String {
    match v {
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn to_csv(rows: &[BoundRow]) -> Result<String> {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let v = serde_json::to_value(r).map_err(|e| Error::Io(e.to_string()))?;
        let cells: Vec<String> = CSV_COLUMNS
            .iter()
            .map(|c| v.get(*c).map(cell).ok_or_else(|| Error::Io(format!("row has no field {c}"))))
            .collect::<Result<_>>()?;
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn to_json(report: &SweepReport) -> Result<String> {
    let v = json!({
        "rows": report.rows,
        "fit": report.fit,
        "config": report.config,
        "violations": report.violations,
        "advisories": report.advisories,
        "errors": report.errors,
        "exit_code": report.exit_code(),
    });
    serde_json::to_string_pretty(&v).map(|mut s| {
        s.push('\n');
        s
    })
    .map_err(|e| Error::Io(e.to_string()))
}

pub fn write_report(report: &SweepReport, path: &Path, format: OutputFormat) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => to_csv(&report.rows)?,
        OutputFormat::Json => to_json(report)?,
    };
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
