//! CSV and JSON surfaces.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading
//! a file back reproduces every value bit-exactly.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Serde adapter writing `±∞` as the strings `"inf"` / `"-inf"`.
pub mod float_or_inf {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    struct FloatVisitor;

    impl<'de> Visitor<'de> for FloatVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a number or \"inf\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v.to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(FloatVisitor)
    }
}

/// [`float_or_inf`] for optional fields; `null` or absence means `None`.
pub mod opt_float_or_inf {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::float_or_inf")] f64);

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

fn parse_f64(field: &str, line: u64) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("line {line}: cannot parse {field:?} as a number")))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn dataset_header(d1: usize, d2: usize) -> Vec<String> {
    std::iter::once("y".to_string())
        .chain((1..=d1).map(|i| format!("x{i}")))
        .chain((1..=d2).map(|i| format!("z{i}")))
        .collect()
}

pub fn write_dataset<W: Write>(data: &Dataset, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(dataset_header(data.d1(), data.d2()))?;
    for i in 0..data.n() {
        let (xr, zr) = (data.x.row(i), data.z.row(i));
        let row = std::iter::once(data.y[i])
            .chain(xr.iter().copied())
            .chain(zr.iter().copied());
        w.write_record(row.map(format_f64))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dataset_file(data: &Dataset, path: &Path) -> Result<()> {
    write_dataset(data, create(path)?)
}

/// Reads `y,x1..,z1..`; column roles come from the header names.
pub fn read_dataset<R: Read>(input: R) -> Result<Dataset> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = r.headers()?.clone();
    let mut y_col = None;
    let mut x_cols = Vec::new();
    let mut z_cols = Vec::new();
    for (c, name) in header.iter().enumerate() {
        let index = |prefix: &str| {
            name.strip_prefix(prefix)
                .and_then(|s| s.parse::<usize>().ok())
        };
        if name == "y" {
            y_col = Some(c);
        } else if let Some(i) = index("x") {
            x_cols.push((i, c));
        } else if let Some(i) = index("z") {
            z_cols.push((i, c));
        } else {
            return Err(Error::Config(format!("unknown dataset column {name:?}")));
        }
    }
    let y_col = y_col.ok_or_else(|| Error::Config("dataset lacks a y column".into()))?;
    for cols in [&mut x_cols, &mut z_cols] {
        cols.sort();
        if cols.iter().enumerate().any(|(p, &(i, _))| i != p + 1) {
            return Err(Error::Config(
                "x and z columns must be numbered 1..d".into(),
            ));
        }
    }
    let (mut y, mut x, mut z) = (Vec::new(), Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(Error::DimensionMismatch(format!(
                "line {line}: wrong field count"
            )));
        }
        y.push(parse_f64(&rec[y_col], line)?);
        for &(_, c) in &x_cols {
            x.push(parse_f64(&rec[c], line)?);
        }
        for &(_, c) in &z_cols {
            z.push(parse_f64(&rec[c], line)?);
        }
    }
    let n = y.len();
    let x = Array2::from_shape_vec((n, x_cols.len()), x).expect("row-major shape");
    let z = Array2::from_shape_vec((n, z_cols.len()), z).expect("row-major shape");
    Dataset::new(Array1::from(y), x, z)
}

pub fn read_dataset_file(path: &Path) -> Result<Dataset> {
    read_dataset(File::open(path)?)
}

/// Writes `row,col,value` triplets (1-based) after a `#` metadata line.
pub fn write_triplets<W: Write>(
    m: &Array2<f64>,
    meta: &[(&str, String)],
    mut out: W,
) -> Result<()> {
    let meta: Vec<String> = meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
    writeln!(out, "# {}", meta.join(" "))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["row", "col", "value"])?;
    for ((i, j), v) in m.indexed_iter() {
        w.write_record([(i + 1).to_string(), (j + 1).to_string(), format_f64(*v)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_triplets_file(m: &Array2<f64>, meta: &[(&str, String)], path: &Path) -> Result<()> {
    write_triplets(m, meta, create(path)?)
}

/// Reads triplets back into a dense matrix whose shape is the largest index.
pub fn read_triplets<R: Read>(input: R) -> Result<Array2<f64>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut entries = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let idx = |s: &str| {
            s.parse::<usize>()
                .ok()
                .filter(|&i| i >= 1)
                .ok_or_else(|| Error::Config(format!("line {line}: bad index {s:?}")))
        };
        entries.push((idx(&rec[0])?, idx(&rec[1])?, parse_f64(&rec[2], line)?));
    }
    let rows = entries.iter().map(|e| e.0).max().unwrap_or(0);
    let cols = entries.iter().map(|e| e.1).max().unwrap_or(0);
    let mut m = Array2::zeros((rows, cols));
    for (i, j, v) in entries {
        m[(i - 1, j - 1)] = v;
    }
    Ok(m)
}

/// Reads a headed numeric table (for example a `z1,..,z{d2}` file).
pub fn read_matrix<R: Read>(input: R) -> Result<Array2<f64>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let cols = r.headers()?.len();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        for f in rec.iter() {
            values.push(parse_f64(f, line)?);
        }
    }
    let rows = values.len() / cols.max(1);
    let m = Array2::from_shape_vec((rows, cols), values).expect("row-major shape");
    if let Some(((i, j), _)) = m.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "matrix",
            index: format!("({i},{j})"),
        });
    }
    Ok(m)
}

pub fn read_matrix_file(path: &Path) -> Result<Array2<f64>> {
    read_matrix(File::open(path)?)
}
