//! Signal and spectrum files.
//!
//! CSV: header `index,re,im`, one row per element in enumeration order.
//! JSON: `{"group": "Z64", "values": [[re, im], ...]}`.
//! Numbers are written with 17 significant digits, so a write/read cycle
//! reproduces every double exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::spectral::{GroupRef, Signal, Spectrum};

/// 17 significant digits in scientific notation.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileFormat {
    Csv,
    Json,
}

impl FileFormat {
    /// `.json` selects JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Self::Json,
            _ => Self::Csv,
        }
    }
}

pub fn write_values_csv<W: Write>(mut w: W, values: &[Complex64]) -> Result<()> {
    writeln!(w, "index,re,im")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(w, "{i},{},{}", fmt17(v.re), fmt17(v.im))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_values_json<W: Write>(mut w: W, group: &FiniteAbelianGroup, values: &[Complex64]) -> Result<()> {
    write!(w, "{{\"group\": {}, \"values\": [", serde_json::to_string(&group.descriptor())?)?;
    for (i, v) in values.iter().enumerate() {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { index: i });
        }
        let sep = if i == 0 { "" } else { ", " };
        write!(w, "{sep}[{}, {}]", fmt17(v.re), fmt17(v.im))?;
    }
    writeln!(w, "]}}")?;
    w.flush()?;
    Ok(())
}

/// Reads `index,re,im` rows; the `im` column may be omitted for real data.
pub fn read_values_csv<R: Read>(r: R, expected_len: usize) -> Result<Vec<Complex64>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers().map_err(|e| Error::Format(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (ci, cre) = match (col("index"), col("re")) {
        (Some(i), Some(r)) => (i, r),
        _ => return Err(Error::Format(format!("expected header index,re,im, got {:?}", headers.iter().collect::<Vec<_>>()))),
    };
    let cim = col("im");
    let mut out = Vec::with_capacity(expected_len);
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
        let field = |c: usize| -> Result<&str> {
            rec.get(c).ok_or_else(|| Error::Format(format!("row {row}: missing column {c}")))
        };
        let num = |c: usize| -> Result<f64> {
            let s = field(c)?;
            s.parse::<f64>()
                .map_err(|_| Error::Format(format!("row {row}: {s:?} is not a number")))
        };
        let index: usize = field(ci)?
            .parse()
            .map_err(|_| Error::Format(format!("row {row}: bad index")))?;
        if index != row {
            return Err(Error::Format(format!("row {row}: index {index} out of enumeration order")));
        }
        let re = num(cre)?;
        let im = match cim {
            Some(c) => num(c)?,
            None => 0.0,
        };
        if !(re.is_finite() && im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        out.push(Complex64::new(re, im));
    }
    if out.len() != expected_len {
        return Err(Error::LengthMismatch {
            expected: expected_len,
            found: out.len(),
        });
    }
    Ok(out)
}

#[derive(Deserialize)]
struct JsonValues {
    group: String,
    values: Vec<[f64; 2]>,
}

/// Returns the group named in the file together with its values.
pub fn read_values_json<R: Read>(r: R) -> Result<(FiniteAbelianGroup, Vec<Complex64>)> {
    let parsed: JsonValues = serde_json::from_reader(r)?;
    let group = FiniteAbelianGroup::parse(&parsed.group)?;
    if parsed.values.len() != group.order() {
        return Err(Error::LengthMismatch {
            expected: group.order(),
            found: parsed.values.len(),
        });
    }
    Ok((group, parsed.values.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()))
}

fn check_group(expected: &FiniteAbelianGroup, found: &FiniteAbelianGroup) -> Result<()> {
    if expected.factors() != found.factors() {
        return Err(Error::GroupMismatch {
            left: expected.descriptor(),
            right: found.descriptor(),
        });
    }
    Ok(())
}

fn read_values_file(path: &Path, group: Option<&GroupRef>) -> Result<(GroupRef, Vec<Complex64>)> {
    let file = BufReader::new(File::open(path)?);
    match FileFormat::from_path(path) {
        FileFormat::Json => {
            let (g, values) = read_values_json(file)?;
            match group {
                Some(expected) => {
                    check_group(expected, &g)?;
                    Ok((expected.clone(), values))
                }
                None => Ok((Arc::new(g), values)),
            }
        }
        FileFormat::Csv => {
            let group = group.ok_or_else(|| {
                Error::Format(format!("{}: CSV files need an explicit group", path.display()))
            })?;
            Ok((group.clone(), read_values_csv(file, group.order())?))
        }
    }
}

fn write_values_file(path: &Path, group: &FiniteAbelianGroup, values: &[Complex64]) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    match FileFormat::from_path(path) {
        FileFormat::Json => write_values_json(file, group, values),
        FileFormat::Csv => write_values_csv(file, values),
    }
}

/// Reads a signal; `group` is required for CSV and checked against JSON.
pub fn read_signal(path: impl AsRef<Path>, group: Option<&GroupRef>) -> Result<Signal> {
    let (g, values) = read_values_file(path.as_ref(), group)?;
    Signal::new(g, values)
}

pub fn write_signal(path: impl AsRef<Path>, f: &Signal) -> Result<()> {
    write_values_file(path.as_ref(), f.group(), f.values())
}

pub fn read_spectrum(path: impl AsRef<Path>, group: Option<&GroupRef>) -> Result<Spectrum> {
    let (g, values) = read_values_file(path.as_ref(), group)?;
    Spectrum::new(g, values)
}

pub fn write_spectrum(path: impl AsRef<Path>, s: &Spectrum) -> Result<()> {
    write_values_file(path.as_ref(), s.group(), s.values())
}

/// User weight table: header `index,gamma`, rows in dual enumeration order.
pub fn read_weight_table<R: Read>(r: R) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers().map_err(|e| Error::Format(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (ci, cg) = match (col("index"), col("gamma")) {
        (Some(i), Some(g)) => (i, g),
        _ => return Err(Error::Format("expected header index,gamma".into())),
    };
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
        let index: usize = rec
            .get(ci)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("row {row}: bad index")))?;
        if index != row {
            return Err(Error::Format(format!("row {row}: index {index} out of enumeration order")));
        }
        let gamma: f64 = rec
            .get(cg)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("row {row}: bad gamma")))?;
        out.push(gamma);
    }
    Ok(out)
}

pub fn read_weight_table_file(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    read_weight_table(BufReader::new(File::open(path)?))
}
