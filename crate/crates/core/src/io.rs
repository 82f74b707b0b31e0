//! Comma-separated input and output.

use crate::error::{usage, Error, Result};
use crate::metric::{CentroidSet, Dataset};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

/// Reads a matrix of doubles, one point per row. `header` skips the first
/// row. Rows and columns in errors are 1-based and count the header.
pub fn read_dataset_from(reader: impl Read, header: bool) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut values = Vec::new();
    let mut dim = None;
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        match dim {
            None => dim = Some(rec.len()),
            Some(d) if d != rec.len() => {
                return Err(Error::Parse {
                    row,
                    column: rec.len().min(d) + 1,
                    message: format!("expected {d} columns, found {}", rec.len()),
                })
            }
            _ => {}
        }
        for (j, cell) in rec.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                column: j + 1,
                message: format!("'{cell}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    column: j + 1,
                    message: format!("'{cell}' is not finite"),
                });
            }
            values.push(v);
        }
    }
    match dim {
        Some(d) => Dataset::new(values, d),
        None => usage("input has no data rows"),
    }
}

pub fn read_dataset(path: impl AsRef<Path>, header: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    read_dataset_from(f, header)
}

/// One row per point, shortest round-trip formatting.
pub fn write_dataset_to(mut w: impl Write, data: &Dataset) -> Result<()> {
    let mut line = String::new();
    for row in data.rows() {
        line.clear();
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            write!(line, "{v:?}").expect("writing to a String");
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_centroids(path: impl AsRef<Path>, centroids: &CentroidSet) -> Result<()> {
    write_dataset_to(BufWriter::new(File::create(path)?), centroids.positions())
}

/// One zero-based centroid index per line.
pub fn write_assignments_to(mut w: impl Write, assignments: &[usize]) -> Result<()> {
    for a in assignments {
        writeln!(w, "{a}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_assignments(path: impl AsRef<Path>, assignments: &[usize]) -> Result<()> {
    write_assignments_to(BufWriter::new(File::create(path)?), assignments)
}
