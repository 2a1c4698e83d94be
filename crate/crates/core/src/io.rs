//! CSV formats: points (one row per point, one column per coordinate),
//! labels (one integer per row) and dense matrices. Files carry no header
//! unless `header` is set, in which case the first row is skipped.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel_graph::PointSet;
use crate::partition::Partition;

fn reader<R: Read>(r: R, header: bool) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(header).flexible(true).trim(csv::Trim::All).from_reader(r)
}

fn parse_rows<R: Read>(r: R, header: bool) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (line, rec) in reader(r, header).records().enumerate() {
        let rec = rec?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("row {}: '{s}': {e}", line + 1))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_points<R: Read>(r: R, header: bool) -> Result<PointSet> {
    PointSet::new(parse_rows(r, header)?)
}

pub fn read_points_file(path: &Path, header: bool) -> Result<PointSet> {
    read_points(std::fs::File::open(path)?, header)
}

pub fn read_matrix<R: Read>(r: R, header: bool) -> Result<DMatrix<f64>> {
    let rows = parse_rows(r, header)?;
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Parse("matrix rows have different lengths".into()));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

pub fn read_matrix_file(path: &Path, header: bool) -> Result<DMatrix<f64>> {
    read_matrix(std::fs::File::open(path)?, header)
}

/// Labels may be any nonnegative integers; they are compacted to `0..k` in
/// order of first appearance.
pub fn read_labels<R: Read>(r: R, header: bool) -> Result<Partition> {
    let mut raw = Vec::new();
    for (line, rec) in reader(r, header).records().enumerate() {
        let rec = rec?;
        let Some(field) = rec.get(0).filter(|s| !s.is_empty()) else {
            continue;
        };
        let v = field
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("label row {}: '{field}': {e}", line + 1)))?;
        raw.push(v);
    }
    let mut map = std::collections::HashMap::new();
    let labels: Vec<usize> = raw
        .iter()
        .map(|v| {
            let next = map.len();
            *map.entry(*v).or_insert(next)
        })
        .collect();
    Partition::from_labels(labels)
}

pub fn read_labels_file(path: &Path, header: bool) -> Result<Partition> {
    read_labels(std::fs::File::open(path)?, header)
}

fn fmt(x: f64) -> String {
    // shortest round-trip representation
    format!("{x:?}")
}

pub fn write_points<W: Write>(w: W, pts: &PointSet) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for p in pts.coords() {
        wr.write_record(p.iter().map(|&x| fmt(x)))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_labels<W: Write>(w: W, p: &Partition) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for l in p.labels() {
        wr.write_record([l.to_string()])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_matrix<W: Write>(w: W, m: &DMatrix<f64>) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for row in m.row_iter() {
        wr.write_record(row.iter().map(|&x| fmt(x)))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_to_file(path: &Path, f: impl FnOnce(&mut std::fs::File) -> Result<()>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut file = std::fs::File::create(path)?;
    f(&mut file)
}
