//! Evaluation reports as CSV (fixed columns) plus JSON (full records).

use std::path::{Path, PathBuf};

use nisqc_core::eval::EvalReport;

use crate::error::Error;
use crate::fsio::write_all_atomic;

pub const REPORT_COLUMNS: [&str; 8] = [
    "benchmark",
    "variant",
    "reliability",
    "mc_success",
    "stderr",
    "makespan",
    "swaps",
    "compile_time_s",
];

pub fn report_csv(reports: &[EvalReport]) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_COLUMNS)?;
    for r in reports {
        w.write_record([
            r.benchmark.clone(),
            r.variant.clone(),
            r.reliability.to_string(),
            r.mc_success.to_string(),
            r.stderr.to_string(),
            r.makespan.to_string(),
            r.swaps.to_string(),
            r.compile_time_s.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

/// Companion JSON path of a CSV report.
pub fn json_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes `csv_path` and its `.json` sibling.
pub fn write_report(reports: &[EvalReport], csv_path: &Path) -> Result<(), Error> {
    let csv = report_csv(reports)?;
    let mut json = serde_json::to_string_pretty(reports)?;
    json.push('\n');
    let jp = json_path(csv_path);
    write_all_atomic(&[(csv_path, csv.as_bytes()), (&jp, json.as_bytes())])
}

pub fn read_report_json(path: &Path) -> Result<Vec<EvalReport>, Error> {
    let text = crate::fsio::read(path)?;
    Ok(serde_json::from_str(&text)?)
}
