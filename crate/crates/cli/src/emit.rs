//! Writing sweep results.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::{Format, OutputSpec};
use crate::error::{CliError, Result};
use crate::sweep::SweepRow;

/// Full double precision in scientific notation.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

pub fn header(labels: &[String]) -> Vec<String> {
    let mut h = vec!["omega".to_string(), "kappa_tot".into(), "h_sql".into()];
    h.extend(labels.iter().cloned());
    h.push("diagnostic".into());
    h
}

pub fn write_csv<W: Write>(rows: &[SweepRow], labels: &[String], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io_err = |e: csv::Error| CliError::Io {
        context: "cannot write CSV".into(),
        source: io::Error::new(io::ErrorKind::Other, e),
    };
    w.write_record(header(labels)).map_err(io_err)?;
    for row in rows {
        let mut rec = vec![format_number(row.omega), fmt_opt(row.kappa_tot), fmt_opt(row.h_sql)];
        rec.extend(row.values.iter().map(|v| fmt_opt(*v)));
        rec.push(row.diagnostic.clone().unwrap_or_default());
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush().map_err(|source| CliError::Io {
        context: "cannot write CSV".into(),
        source,
    })
}

fn number(x: Option<f64>) -> Value {
    x.and_then(serde_json::Number::from_f64)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn write_json_lines<W: Write>(rows: &[SweepRow], labels: &[String], mut out: W) -> Result<()> {
    let io_err = |source| CliError::Io {
        context: "cannot write JSON lines".into(),
        source,
    };
    for row in rows {
        let mut obj = Map::new();
        obj.insert("omega".into(), number(Some(row.omega)));
        obj.insert("kappa_tot".into(), number(row.kappa_tot));
        obj.insert("h_sql".into(), number(row.h_sql));
        for (label, v) in labels.iter().zip(&row.values) {
            obj.insert(label.clone(), number(*v));
        }
        obj.insert(
            "diagnostic".into(),
            row.diagnostic.clone().map(Value::String).unwrap_or(Value::Null),
        );
        serde_json::to_writer(&mut out, &Value::Object(obj)).map_err(|e| io_err(e.into()))?;
        out.write_all(b"\n").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn write_rows<W: Write>(rows: &[SweepRow], labels: &[String], format: Format, out: W) -> Result<()> {
    if rows.is_empty() {
        return Err(CliError::Validation("nothing to write: no sweep rows".into()));
    }
    match format {
        Format::Csv => write_csv(rows, labels, out),
        Format::JsonLines => write_json_lines(rows, labels, out),
    }
}

/// Writes to the configured path, or standard output when none is set.
pub fn emit(rows: &[SweepRow], labels: &[String], spec: &OutputSpec) -> Result<()> {
    match &spec.path {
        Some(path) => {
            let file = create(path)?;
            write_rows(rows, labels, spec.format, BufWriter::new(file))
        }
        None => write_rows(rows, labels, spec.format, io::stdout().lock()),
    }
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| CliError::Io {
        context: format!("cannot create {}", path.display()),
        source,
    })
}
