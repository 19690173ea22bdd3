use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use super::study::ConvergenceReport;
use crate::error::{Error, Result};

pub const CSV_COLUMNS: [&str; 9] = [
    "scenario-id",
    "method",
    "D_plus",
    "D_minus",
    "lambda",
    "resolution",
    "error",
    "slope-so-far",
    "wall-ms",
];

#[derive(Serialize)]
struct CsvRow<'a> {
    id: &'a str,
    method: &'a str,
    d_plus: f64,
    d_minus: f64,
    lambda: f64,
    resolution: f64,
    error: f64,
    slope: Option<f64>,
    wall_ms: Option<f64>,
}

/// One row per `(scenario, resolution)`. With `timing` off the `wall-ms`
/// column is left empty so that repeated runs produce identical bytes.
pub fn write_csv<W: Write>(reports: &[ConvergenceReport], out: W, timing: bool) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in reports {
        let s = &r.scenario;
        for row in &r.rows {
            w.serialize(CsvRow {
                id: &s.id,
                method: s.method.tag(),
                d_plus: s.d_plus,
                d_minus: s.d_minus,
                lambda: s.lambda,
                resolution: row.resolution,
                error: row.error,
                slope: row.slope_so_far,
                wall_ms: timing.then_some(row.wall_ms),
            })
            .map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn csv_string(reports: &[ConvergenceReport], timing: bool) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(reports, &mut buf, timing)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

/// Fitted slopes, diagnostics and per-row estimates of each report.
pub fn summary_json(reports: &[ConvergenceReport], timing: bool) -> Value {
    let items: Vec<Value> = reports
        .iter()
        .map(|r| {
            let report = if timing { r.clone() } else { r.without_timings() };
            let mut v = json!({
                "scenario-id": report.scenario.id,
                "method": report.scenario.method.tag(),
                "D_plus": report.scenario.d_plus,
                "D_minus": report.scenario.d_minus,
                "lambda": report.scenario.lambda,
                "slope": report.fit.map(|f| f.slope),
                "intercept": report.fit.map(|f| f.intercept),
                "diagnostics": report.diagnostics,
                "rows": report.rows,
                "scenario": report.scenario,
            });
            if timing {
                v["wall-ms"] = json!(report.wall_ms);
            }
            v
        })
        .collect();
    json!({ "reports": items })
}
