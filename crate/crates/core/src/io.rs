//! JSON files for families and matrices, CSV traces, and number formatting
//! shared by the command-line front end.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::NonNegativeMatrix;
use crate::optimizer::IterationTrace;
use crate::rowsets::ProductFamily;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let reader = BufReader::new(File::open(path)?);
    Ok(serde_json::from_reader(reader)?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Reads `{"d": .., "sets": [..]}` and validates every set.
pub fn read_family(path: impl AsRef<Path>) -> Result<ProductFamily> {
    read_json(path.as_ref())
}

pub fn write_family(path: impl AsRef<Path>, family: &ProductFamily) -> Result<()> {
    write_json(path.as_ref(), family)
}

/// Reads `{"d": .., "rows": [[..]]}`.
pub fn read_matrix(path: impl AsRef<Path>) -> Result<NonNegativeMatrix> {
    read_json(path.as_ref())
}

pub fn write_matrix(path: impl AsRef<Path>, matrix: &NonNegativeMatrix) -> Result<()> {
    write_json(path.as_ref(), matrix)
}

/// Trace as CSV with columns `iter, rho, s_bound, t_bound, rows_changed,
/// time_s`. Changed rows are joined with `;`; infinite bounds print as `inf`.
pub fn write_trace_csv<W: Write>(writer: W, trace: &IterationTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["iter", "rho", "s_bound", "t_bound", "rows_changed", "time_s"])?;
    for r in trace.iter() {
        let rows: Vec<String> = r.rows_changed.iter().map(usize::to_string).collect();
        w.write_record([
            r.iter.to_string(),
            r.rho.to_string(),
            r.s.to_string(),
            r.t.to_string(),
            rows.join(";"),
            format!("{:.6}", r.time_s),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Fixed six decimals with trailing zeros removed: `12`, `3.21432`, `0.5`.
pub fn format_value(x: f64) -> String {
    if !x.is_finite() {
        return if x > 0.0 { "inf".into() } else { x.to_string() };
    }
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}
