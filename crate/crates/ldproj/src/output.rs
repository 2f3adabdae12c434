//! Output files. Every file starts with the tool version and the config hash:
//! `#` comment lines for CSV, a leading object for JSON and JSON lines.
//!
//! Floats are written in the shortest form that parses back to the same bits;
//! infinities are `inf`/`-inf` in CSV and `null` (plus an explicit flag where
//! the schema has one) in JSON.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use ldproj_core::{ConjugateResult, DirectionArray, RateFunctionTable};
use serde_json::{json, Value};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
}

impl Provenance {
    pub fn comment_lines(&self) -> String {
        format!("# ldproj {VERSION}\n# config_sha256 {}\n", self.config_hash)
    }

    pub fn json(&self) -> Value {
        json!({ "tool": "ldproj", "version": VERSION, "config_sha256": self.config_hash })
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:?}")
    }
}

/// JSON number, or `null` when not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub struct CsvSink {
    path: PathBuf,
    inner: csv::Writer<BufWriter<File>>,
}

impl CsvSink {
    pub fn create(path: &Path, prov: &Provenance, header: &[&str]) -> Result<Self, CliError> {
        let mut file = create(path)?;
        file.write_all(prov.comment_lines().as_bytes())?;
        let mut inner = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);
        inner.write_record(header)?;
        Ok(Self { path: path.to_path_buf(), inner })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields)?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), CliError> {
        self.inner.flush().with_context(|| format!("flushing {}", self.path.display()))?;
        Ok(())
    }
}

impl Drop for CsvSink {
    fn drop(&mut self) {
        let _ = self.inner.flush();
    }
}

pub struct JsonLinesSink {
    path: PathBuf,
    inner: BufWriter<File>,
}

impl JsonLinesSink {
    pub fn create(path: &Path, prov: &Provenance) -> Result<Self, CliError> {
        let mut inner = create(path)?;
        writeln!(inner, "{}", prov.json())?;
        Ok(Self { path: path.to_path_buf(), inner })
    }

    pub fn row(&mut self, v: &Value) -> Result<(), CliError> {
        writeln!(self.inner, "{v}")?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), CliError> {
        self.inner.flush().with_context(|| format!("flushing {}", self.path.display()))?;
        Ok(())
    }
}

impl Drop for JsonLinesSink {
    fn drop(&mut self) {
        let _ = self.inner.flush();
    }
}

/// `{"meta": provenance, "data": data}`, pretty-printed.
pub fn write_json(path: &Path, prov: &Provenance, data: Value) -> Result<(), CliError> {
    let mut w = create(path)?;
    let doc = json!({ "meta": prov.json(), "data": data });
    serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| CliError::from(anyhow::Error::from(e)))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn conjugate_json(r: &ConjugateResult) -> Value {
    json!({
        "w": num(r.w),
        "value": num(r.value),
        "infinite": r.value.is_infinite(),
        "tilt": r.tilt.map_or(Value::Null, num),
        "attained": r.attained,
    })
}

pub fn write_rate_table(path: &Path, prov: &Provenance, table: &RateFunctionTable, json: bool) -> Result<(), CliError> {
    if json {
        let rows: Vec<Value> = table.results.iter().map(conjugate_json).collect();
        return write_json(path, prov, json!({ "kind": table.kind.as_str(), "dist": table.dist, "rows": rows }));
    }
    let mut sink = CsvSink::create(path, prov, &["w", "value", "tilt", "attained"])?;
    for r in &table.results {
        sink.row([fmt_f64(r.w), fmt_f64(r.value), r.tilt.map(fmt_f64).unwrap_or_default(), r.attained.to_string()])?;
    }
    sink.flush()
}

/// The row as one value per line plus a JSON sidecar with mode and seed.
pub fn write_direction_row(dir: &Path, stem: &str, prov: &Provenance, arr: &DirectionArray) -> Result<(), CliError> {
    let mut w = create(&dir.join(format!("{stem}.csv")))?;
    w.write_all(prov.comment_lines().as_bytes())?;
    for &x in &arr.row {
        writeln!(w, "{}", fmt_f64(x))?;
    }
    w.flush()?;
    write_json(
        &dir.join(format!("{stem}.json")),
        prov,
        json!({
            "mode": arr.mode.as_str(),
            "n": arr.n,
            "seed": arr.seed,
            "normalized": arr.normalized,
            "attempt": arr.attempt,
        }),
    )
}
