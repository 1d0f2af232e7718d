use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::parallel::StrategyKind;

/// Column order of the results CSV.
pub const CSV_HEADER: &str = "scenario,strategy,workers,budget,rep,seed,success,steps,wall_ms";

/// One benchmark episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    pub strategy: StrategyKind,
    pub workers: usize,
    pub budget: usize,
    pub rep: usize,
    pub seed: u64,
    pub success: bool,
    pub steps: usize,
    pub wall_ms: f64,
}

impl RunRecord {
    /// The record with wall time zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_ms: 0.0,
            ..self.clone()
        }
    }
}

/// A record plus what does not fit in the CSV: the executed action trace and
/// the failure message of a failed episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub record: RunRecord,
    pub trace: Vec<Vec<Vec<f64>>>,
    pub error: Option<String>,
}

pub fn write_csv<W: Write>(writer: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for rec in r.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

pub fn write_csv_file(path: &Path, records: &[RunRecord]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_csv(std::fs::File::create(path)?, records)
}

pub fn read_csv_file(path: &Path) -> Result<Vec<RunRecord>> {
    read_csv(std::fs::File::open(path)?)
}

pub fn to_csv_string(records: &[RunRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, records)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}
