use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::expfam::Dataset;

fn parse_cell(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads a CSV dataset: one point per row, numeric columns, and an optional
/// header (a first row in which no cell parses as a number).
///
/// Row numbers in errors are 1-based lines of the file.
pub fn read_dataset<R: Read>(reader: R, jitter: Option<f64>) -> Result<Dataset> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut lines: Vec<usize> = Vec::new();
    let mut width = None;
    for (i, record) in csv.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if i == 0 && record.iter().all(|c| parse_cell(c).is_none()) {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRow {
                row: line,
                expected,
                found: record.len(),
            });
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, cell)| {
                parse_cell(cell).ok_or_else(|| Error::NonNumeric {
                    row: line,
                    col: col + 1,
                    cell: cell.to_string(),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
        lines.push(line);
    }
    let built = match jitter {
        Some(eps) => Dataset::with_jitter(rows, eps),
        None => Dataset::new(rows),
    };
    built.map_err(|e| match e {
        Error::DuplicatePoint { row, first } => Error::DuplicatePoint {
            row: lines[row],
            first: lines[first],
        },
        other => other,
    })
}

/// [`read_dataset`] on a file.
pub fn load_dataset(path: impl AsRef<Path>, jitter: Option<f64>) -> Result<Dataset> {
    read_dataset(std::fs::File::open(path)?, jitter)
}

/// Writes one point per row, no header, shortest round-trip decimals.
pub fn write_dataset<W: std::io::Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for p in data.points() {
        csv.write_record(p.iter().map(|v| v.to_string()))?;
    }
    csv.flush()?;
    Ok(())
}
