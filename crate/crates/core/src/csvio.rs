//! CSV formats: `x,value` for functions on the half-line and `tau,re,im` for
//! functions on the critical line. A header row is required.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function::{DecayClass, SampledFunction};
use crate::mellin::MellinLineFunction;

pub const SAMPLE_HEADER: [&str; 2] = ["x", "value"];
pub const LINE_HEADER: [&str; 3] = ["tau", "re", "im"];

fn read_table<R: Read, const N: usize>(input: R, header: [&str; N]) -> Result<Vec<[f64; N]>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
    let found: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if found != header {
        return Err(Error::Csv(format!("expected header {}, found {}", header.join(","), found.join(","))));
    }
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != N {
            return Err(Error::Csv(format!("row {}: expected {N} fields", line + 1)));
        }
        let mut row = [0.0; N];
        for (slot, field) in row.iter_mut().zip(rec.iter()) {
            *slot = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Csv(format!("row {}: bad number '{field}'", line + 1)))?;
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Csv("no data rows".into()));
    }
    Ok(rows)
}

/// Reads `x,value` rows.
pub fn read_samples<R: Read>(input: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows = read_table(input, SAMPLE_HEADER)?;
    Ok(rows.into_iter().map(|[x, v]| (x, v)).unzip())
}

/// Reads `x,value` rows into a validated [`SampledFunction`].
pub fn read_sampled_function<R: Read>(input: R, decay: DecayClass) -> Result<SampledFunction> {
    let (x, v) = read_samples(input)?;
    SampledFunction::new(x, v, decay)
}

/// Reads `tau,re,im` rows into a validated [`MellinLineFunction`].
pub fn read_line_function<R: Read>(input: R) -> Result<MellinLineFunction> {
    let rows = read_table(input, LINE_HEADER)?;
    let (tau, values) = rows
        .into_iter()
        .map(|[t, re, im]| (t, Complex64::new(re, im)))
        .unzip();
    MellinLineFunction::new(tau, values, false)
}

/// Writes `x,value` rows. Numbers use the shortest round-trip form.
pub fn write_samples<W: Write>(out: W, x: &[f64], values: &[f64]) -> Result<()> {
    if x.len() != values.len() {
        return Err(Error::InvalidInput("grid and values differ in length".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SAMPLE_HEADER)?;
    for (a, b) in x.iter().zip(values) {
        w.write_record([a.to_string(), b.to_string()])?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))
}

/// Writes `tau,re,im` rows.
pub fn write_line_function<W: Write>(out: W, big_f: &MellinLineFunction) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LINE_HEADER)?;
    for (t, v) in big_f.tau_grid().iter().zip(big_f.values()) {
        w.write_record([t.to_string(), v.re.to_string(), v.im.to_string()])?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))
}
