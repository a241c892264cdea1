use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::metric::PointSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    /// Zero-based columns to read. `None` keeps every column that parses
    /// as a number on every row.
    pub columns: Option<Vec<usize>>,
    pub skip_header: bool,
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self { columns: None, skip_header: false, delimiter: b',' }
    }
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub points: PointSet,
    /// Columns that became coordinates, in order.
    pub columns: Vec<usize>,
    /// Columns dropped by automatic selection because some cell was not numeric.
    pub dropped: Vec<usize>,
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|x| x.is_finite())
}

pub fn ingest_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Ingested> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    read_points_csv(file, options)
}

/// Reads one point per row. Row numbers in errors are 1-based file lines.
pub fn read_points_csv(reader: impl Read, options: &CsvOptions) -> Result<Ingested> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(options.delimiter)
        .from_reader(reader);
    let mut rows: Vec<(usize, csv::StringRecord)> = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        rows.push((k + 1, rec?));
    }
    if options.skip_header && !rows.is_empty() {
        rows.remove(0);
    }
    let width = rows.first().map(|(_, r)| r.len()).ok_or(Error::EmptySet)?;
    if let Some((line, r)) = rows.iter().find(|(_, r)| r.len() != width) {
        return Err(Error::Invalid(format!("row {line} has {} columns, expected {width}", r.len())));
    }

    let (columns, dropped) = match &options.columns {
        Some(cols) => {
            if let Some(&c) = cols.iter().find(|&&c| c >= width) {
                return Err(Error::Invalid(format!("column {c} does not exist ({width} columns)")));
            }
            let bad: Vec<usize> = rows
                .iter()
                .filter(|(_, r)| cols.iter().any(|&c| parse_cell(&r[c]).is_none()))
                .map(|(line, _)| *line)
                .collect();
            if !bad.is_empty() {
                return Err(Error::Invalid(format!("non-numeric values in selected columns on rows {bad:?}")));
            }
            (cols.clone(), Vec::new())
        }
        None => (0..width).partition(|&c| rows.iter().all(|(_, r)| parse_cell(&r[c]).is_some())),
    };
    if columns.is_empty() {
        return Err(Error::Invalid("no numeric columns selected".into()));
    }
    let coords: Vec<f64> = rows
        .iter()
        .flat_map(|(_, r)| columns.iter().map(move |&c| parse_cell(&r[c]).expect("validated")))
        .collect();
    Ok(Ingested { points: PointSet::from_flat(columns.len(), coords)?, columns, dropped })
}

/// Comma-separated coordinates, one point per line, no header.
pub fn write_points_csv(points: &PointSet, mut out: impl Write) -> std::io::Result<()> {
    for p in points.iter() {
        let line: Vec<String> = p.iter().map(f64::to_string).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}
