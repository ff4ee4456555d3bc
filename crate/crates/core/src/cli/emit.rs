//! CSV and JSON writers for sweep rows and verification reports.
//!
//! Floats are written with 17 significant digits so every value parses back
//! to the same f64. Column order is fixed; nothing run-dependent (times,
//! hostnames) goes into a data file, so identical configs give identical bytes.

use std::io::{self, Write};
use std::str::FromStr;

use serde_json::{Map, Number, Value};

use super::config::Format;
use super::sweep::{error_vs_peak, SweepRow, Verification};
use crate::normalization::Probe;

pub const SWEEP_COLUMNS: [&str; 8] = [
    "k",
    "parity",
    "A_re",
    "A_im",
    "A_abs",
    "phase_mod_pi",
    "norm_constant",
    "delta_strength",
];

pub const REPORT_COLUMNS: [&str; 15] = [
    "check",
    "parity",
    "k0",
    "sigma",
    "window",
    "x",
    "y",
    "k_max",
    "sigma_x",
    "measured",
    "expected",
    "relative_error",
    "error_vs_peak",
    "tolerance",
    "passed",
];

/// A field of a flat record.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Float(f64),
    Text(String),
    Bool(bool),
    Missing,
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Float(v) => format_float(*v),
            Field::Text(s) => s.clone(),
            Field::Bool(b) => b.to_string(),
            Field::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Field::Float(v) if v.is_finite() => {
                Value::Number(Number::from_str(&format_float(*v)).expect("formatted float is a JSON number"))
            }
            Field::Float(_) | Field::Missing => Value::Null,
            Field::Text(s) => Value::String(s.clone()),
            Field::Bool(b) => Value::Bool(*b),
        }
    }
}

pub fn sweep_record(row: &SweepRow) -> Vec<Field> {
    vec![
        Field::Float(row.k),
        Field::Text(row.parity.name().to_string()),
        Field::Float(row.a_re),
        Field::Float(row.a_im),
        Field::Float(row.a_abs),
        Field::Float(row.phase_mod_pi),
        Field::Float(row.norm_constant),
        Field::Float(row.delta_strength),
    ]
}

pub fn report_record(v: &Verification) -> Vec<Field> {
    use Field::*;
    let mut rec = vec![Text(v.name.to_string())];
    match &v.result {
        Ok(r) => {
            match r.probe {
                Probe::Delta {
                    parity,
                    k0,
                    sigma,
                    window,
                } => rec.extend([
                    Text(parity.name().to_string()),
                    Float(k0),
                    Float(sigma),
                    Float(window),
                    Missing,
                    Missing,
                    Missing,
                    Missing,
                ]),
                Probe::Completeness { x, y, k_max, sigma_x } => rec.extend([
                    Missing,
                    Missing,
                    Missing,
                    Missing,
                    Float(x),
                    Float(y),
                    Float(k_max),
                    Float(sigma_x),
                ]),
            }
            rec.extend([
                Float(r.measured),
                Float(r.expected),
                Float(r.relative_error),
                Float(error_vs_peak(r)),
            ]);
        }
        Err(_) => rec.extend(std::iter::repeat_n(Missing, 12)),
    }
    rec.extend([Float(v.tolerance), Bool(v.passed())]);
    rec
}

pub fn write_records<W: Write>(out: W, columns: &[&str], records: &[Vec<Field>], format: Format) -> io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(columns)?;
            for rec in records {
                w.write_record(rec.iter().map(Field::csv))?;
            }
            w.flush()
        }
        Format::Json => {
            let array: Vec<Value> = records
                .iter()
                .map(|rec| {
                    let map: Map<String, Value> = columns
                        .iter()
                        .zip(rec)
                        .map(|(c, f)| (c.to_string(), f.json()))
                        .collect();
                    Value::Object(map)
                })
                .collect();
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &array)?;
            writeln!(out)
        }
    }
}

pub fn emit_rows<W: Write>(out: W, rows: &[SweepRow], format: Format) -> io::Result<()> {
    let records: Vec<_> = rows.iter().map(sweep_record).collect();
    write_records(out, &SWEEP_COLUMNS, &records, format)
}

pub fn emit_reports<W: Write>(out: W, reports: &[Verification], format: Format) -> io::Result<()> {
    let records: Vec<_> = reports.iter().map(report_record).collect();
    write_records(out, &REPORT_COLUMNS, &records, format)
}
