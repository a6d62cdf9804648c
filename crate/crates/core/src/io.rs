//! Path exchange as two-column CSV with header `t,x`.

use std::io::{Read, Write};

use crate::chain::{BinaryPath, Origin, RealPath};
use crate::error::{Error, Result};

/// A path read from disk; binary when every value is 0 or 1.
#[derive(Debug, Clone, PartialEq)]
pub enum PathData {
    Binary(BinaryPath),
    Real(RealPath),
}

impl PathData {
    pub fn n(&self) -> usize {
        match self {
            PathData::Binary(p) => p.n(),
            PathData::Real(p) => p.n(),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn read_path<R: Read>(reader: R) -> Result<PathData> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let col = headers
        .iter()
        .position(|h| h == "x")
        .ok_or_else(|| Error::Parse("missing column 'x'".into()))?;
    let mut values = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let field = rec
            .get(col)
            .ok_or_else(|| Error::Parse(format!("row {} has no x value", line + 1)))?;
        let v: f64 = field
            .parse()
            .map_err(|_| Error::Parse(format!("row {}: '{field}' is not a number", line + 1)))?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::EmptyData);
    }
    if values.iter().all(|&v| v == 0.0 || v == 1.0) {
        let states = values.iter().map(|&v| v as u8).collect();
        Ok(PathData::Binary(BinaryPath::new(states, Origin::External)?))
    } else {
        Ok(PathData::Real(RealPath::new(values, Origin::External)?))
    }
}

pub fn write_binary_path<W: Write>(writer: W, path: &BinaryPath) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "x"]).map_err(csv_err)?;
    for (t, x) in path.states().iter().enumerate() {
        w.write_record([t.to_string(), x.to_string()]).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

/// Values are written in shortest round-trip form, so reading back is lossless.
pub fn write_real_path<W: Write>(writer: W, path: &RealPath) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "x"]).map_err(csv_err)?;
    for (t, x) in path.states().iter().enumerate() {
        w.write_record([t.to_string(), format!("{x:?}")]).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}
