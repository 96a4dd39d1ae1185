use std::io::{Read, Write};

use crate::error::{CoreError, Result};

use super::sim::{Quadrature, SampleBatch};

pub const BATCH_CSV_HEADER: [&str; 8] = ["index", "basis", "x_Q", "x_P", "y_Q", "y_P", "e_Q", "e_P"];

/// One CSV row. `basis` is `Q` or `P` for homodyne, `QP` for heterodyne;
/// an unmeasured Bob quadrature is an empty field.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRecord {
    pub index: usize,
    pub basis: String,
    pub x_q: f64,
    pub x_p: f64,
    pub y_q: Option<f64>,
    pub y_p: Option<f64>,
    pub e_q: f64,
    pub e_p: f64,
}

// 17 significant digits round-trips any f64
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse(field: &str, line: usize) -> Result<f64> {
    field
        .parse()
        .map_err(|_| CoreError::Io(format!("line {line}: bad number `{field}`")))
}

fn parse_opt(field: &str, line: usize) -> Result<Option<f64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse(field, line).map(Some)
    }
}

pub fn write_batch_csv<W: Write>(batch: &SampleBatch, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(BATCH_CSV_HEADER)?;
    for (i, r) in batch.records.iter().enumerate() {
        let basis = match r.basis {
            Some(Quadrature::Q) => "Q",
            Some(Quadrature::P) => "P",
            None => "QP",
        };
        let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
        w.write_record([
            i.to_string(),
            basis.to_string(),
            fmt17(r.x_q),
            fmt17(r.x_p),
            opt(r.y_q),
            opt(r.y_p),
            fmt17(r.e_q),
            fmt17(r.e_p),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_batch_csv<R: Read>(input: R) -> Result<Vec<CsvRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(BATCH_CSV_HEADER) {
        return Err(CoreError::Io(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        out.push(CsvRecord {
            index: rec[0]
                .parse()
                .map_err(|_| CoreError::Io(format!("line {line}: bad index")))?,
            basis: rec[1].to_string(),
            x_q: parse(&rec[2], line)?,
            x_p: parse(&rec[3], line)?,
            y_q: parse_opt(&rec[4], line)?,
            y_p: parse_opt(&rec[5], line)?,
            e_q: parse(&rec[6], line)?,
            e_p: parse(&rec[7], line)?,
        });
    }
    Ok(out)
}
