#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub struct Run {
    pub code: i32,
    pub stderr: String,
    pub out: PathBuf,
}

/// Writes `config` to `dir/config.json` and runs `ldproj <cmd> --out dir/<out>`.
pub fn ldproj(dir: &Path, config: &Value, cmd: &str, out: &str, extra: &[&str]) -> Run {
    let cfg = dir.join(format!("{out}.config.json"));
    std::fs::write(&cfg, config.to_string()).unwrap();
    let out = dir.join(out);
    let o: Output = Command::new(env!("CARGO_BIN_EXE_ldproj"))
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .unwrap();
    Run { code: o.status.code().unwrap_or(-1), stderr: String::from_utf8_lossy(&o.stderr).into_owned(), out }
}

/// Data lines of a CSV output: comment lines dropped, header split off.
pub fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

pub fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

pub fn json_data(path: &Path) -> Value {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v["data"].clone()
}
