//! Subcommand bodies. Each one reads its config section, runs the parallel
//! drivers and writes its files on the calling thread.

use std::fs;
use std::path::{Path, PathBuf};

use ldproj_core::atyp::comparison_from_tables;
use ldproj_core::lmgf::median_gaps;
use ldproj_core::{
    check_hypotheses, e1_lmgf, jensen_check, ComparisonTable, Curvature, DirectionMode, HypothesisReport, RateKind,
    SimulationReport,
};
use serde_json::{json, Value};

use crate::config::{Format, GridConfig, RunConfig};
use crate::drivers;
use crate::error::CliError;
use crate::output::{
    fmt_f64, num, write_direction_row, write_json, write_rate_table, CsvSink, JsonLinesSink, Provenance,
};

/// `t` grid of the Jensen check: `[−5, 5]` in steps of 0.25.
pub const JENSEN_GRID: GridConfig = GridConfig { min: -5.0, max: 5.0, step: 0.25 };

/// A loaded config together with the command-line overrides.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub config: RunConfig,
    pub out: PathBuf,
    pub format: Format,
    pub threads: Option<usize>,
}

impl Invocation {
    /// `--out` and `--format` win over the config's output section, which
    /// wins over the current directory and CSV. `--seed` replaces the config
    /// seed before hashing.
    pub fn new(
        mut config: RunConfig,
        out: Option<PathBuf>,
        format: Option<Format>,
        seed: Option<u64>,
        threads: Option<usize>,
    ) -> Self {
        if let Some(s) = seed {
            config.seed = s;
        }
        let out = out.or_else(|| config.output.as_ref().map(|o| o.path.clone())).unwrap_or_else(|| PathBuf::from("."));
        let format = format.or_else(|| config.output.as_ref().map(|o| o.format)).unwrap_or(Format::Csv);
        Self { config, out, format, threads }
    }

    pub fn provenance(&self) -> Provenance {
        Provenance { config_hash: self.config.hash() }
    }

    fn json(&self) -> bool {
        self.format == Format::Json
    }

    fn ext(&self) -> &'static str {
        if self.json() {
            "json"
        } else {
            "csv"
        }
    }

    fn file(&self, stem: &str) -> PathBuf {
        self.out.join(format!("{stem}.{}", self.ext()))
    }

    fn prepare(&self) -> Result<rayon::ThreadPool, CliError> {
        fs::create_dir_all(&self.out)
            .map_err(|e| CliError::from(e).context(&format!("creating {}", self.out.display())))?;
        drivers::pool(self.threads)
    }
}

pub fn rate(inv: &Invocation) -> Result<(), CliError> {
    let cfg = inv.config.section("rate", &inv.config.rate)?;
    let grid = cfg.grid.points()?;
    if cfg.kinds.is_empty() {
        return Err(CliError::config("rate.kinds is empty"));
    }
    let pool = inv.prepare()?;
    let prov = inv.provenance();
    for &kind in &cfg.kinds {
        let table = pool.install(|| drivers::rate_table(inv.config.dist, kind, &grid))?;
        write_rate_table(&inv.file(rate_stem(kind)), &prov, &table, inv.json())?;
    }
    Ok(())
}

pub fn rate_stem(kind: RateKind) -> &'static str {
    match kind {
        RateKind::CramerRate => "rate_cramer",
        RateKind::UniversalRate => "rate_universal",
    }
}

pub fn compare(inv: &Invocation) -> Result<(), CliError> {
    let cfg = inv.config.section("compare", &inv.config.compare)?;
    let grid = cfg.grid.points()?;
    let pool = inv.prepare()?;
    let prov = inv.provenance();
    let dist = inv.config.dist;

    let report = check_hypotheses(dist)?;
    write_json(&inv.out.join("hypotheses.json"), &prov, hypotheses_json(&report, None))?;
    let class = report.sqrt_curvature.class;
    if class == Curvature::Indeterminate {
        return Err(CliError::verdict("curvature of the log-mgf in sqrt(s) is indeterminate"));
    }

    let (cramer, universal) = pool.install(|| {
        rayon::join(
            || drivers::rate_table(dist, RateKind::CramerRate, &grid),
            || drivers::rate_table(dist, RateKind::UniversalRate, &grid),
        )
    });
    let table = comparison_from_tables(class, &cramer?, &universal?)?;
    write_comparison(&inv.file("compare"), &prov, &table, inv.json())?;

    if !report.consistent {
        return Err(CliError::verdict(format!(
            "curvature {:?} disagrees with moment ratios {:?} or density curvature {:?}",
            class, report.phi_monotonic, report.density_curvature
        )));
    }
    if let Some(v) = table.violation {
        return Err(CliError::verdict(format!(
            "{:?} verdict violated at w = {}: gap {}, expected {}",
            class,
            fmt_f64(v.w),
            fmt_f64(v.gap),
            v.expected
        )));
    }
    Ok(())
}

fn write_comparison(path: &Path, prov: &Provenance, t: &ComparisonTable, json: bool) -> Result<(), CliError> {
    if json {
        let rows: Vec<Value> = t
            .rows
            .iter()
            .map(|r| {
                json!({
                    "w": num(r.w),
                    "cramer": num(r.cramer),
                    "cramer_infinite": r.cramer.is_infinite(),
                    "universal": num(r.universal),
                    "universal_infinite": r.universal.is_infinite(),
                    "gap": num(r.gap),
                    "chi0": num(r.chi0),
                })
            })
            .collect();
        let violation =
            t.violation.map_or(Value::Null, |v| json!({ "w": v.w, "gap": num(v.gap), "expected": v.expected }));
        return write_json(
            path,
            prov,
            json!({ "dist": t.dist, "curvature": t.curvature, "rows": rows, "violation": violation }),
        );
    }
    let mut sink = CsvSink::create(path, prov, &["w", "cramer", "universal", "gap"])?;
    for r in &t.rows {
        sink.row([fmt_f64(r.w), fmt_f64(r.cramer), fmt_f64(r.universal), fmt_f64(r.gap)])?;
    }
    sink.flush()
}

fn hypotheses_json(report: &HypothesisReport, jensen: Option<Value>) -> Value {
    let mut v = serde_json::to_value(report).unwrap_or(Value::Null);
    if let (Some(j), Value::Object(m)) = (jensen, &mut v) {
        m.insert("jensen".into(), j);
    }
    v
}

pub fn check(inv: &Invocation) -> Result<(), CliError> {
    inv.prepare()?;
    let prov = inv.provenance();
    let dist = inv.config.dist;
    let report = check_hypotheses(dist)?;
    let t_grid = JENSEN_GRID.points()?;
    let (jensen, failure) = match jensen_check(dist, &t_grid) {
        Ok(j) => (serde_json::to_value(&j).unwrap_or(Value::Null), None),
        Err(e @ (ldproj_core::Error::Verdict { .. } | ldproj_core::Error::Indeterminate)) => {
            (json!({ "error": e.to_string() }), Some(e))
        }
        Err(e) => return Err(e.into()),
    };
    write_json(&inv.out.join("hypotheses.json"), &prov, hypotheses_json(&report, Some(jensen)))?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    if !report.consistent {
        return Err(CliError::verdict(format!(
            "curvature {:?} disagrees with moment ratios {:?} or density curvature {:?}",
            report.sqrt_curvature.class, report.phi_monotonic, report.density_curvature
        )));
    }
    Ok(())
}

/// Rate `rate_hat` is compared against: `Λ*` along the constant direction,
/// `χ₀` along the first basis vector and `Ψ*` along Gaussian arrays.
pub fn default_reference(mode: DirectionMode) -> Option<RateKind> {
    match mode {
        DirectionMode::CramerIota => Some(RateKind::CramerRate),
        DirectionMode::BasisE1 => None,
        DirectionMode::GaussianIndependent | DirectionMode::GaussianColumnConstant => Some(RateKind::UniversalRate),
    }
}

fn report_json(r: &SimulationReport) -> Value {
    json!({
        "dist": r.dist.label(),
        "mode": r.mode.as_str(),
        "normalized": r.normalized,
        "n": r.n,
        "w": num(r.w),
        "tilt": num(r.tilt),
        "p_hat": num(r.p_hat),
        "stderr": num(r.stderr),
        "rate_hat": num(r.rate_hat),
        "rate_hat_infinite": r.rate_hat.is_infinite(),
        "rate_stderr": num(r.rate_stderr),
        "samples": r.samples,
        "hits": r.hits,
        "seed": r.seed,
        "effective_sample_size": num(r.effective_sample_size),
        "acceptance_rate": num(r.acceptance_rate),
        "warning": r.warning,
    })
}

enum SimSink {
    Csv(Box<CsvSink>),
    Lines(JsonLinesSink),
}

impl SimSink {
    fn write(&mut self, r: &SimulationReport) -> Result<(), CliError> {
        match self {
            SimSink::Csv(s) => {
                s.row([
                    r.dist.label(),
                    r.mode.as_str().to_string(),
                    r.n.to_string(),
                    fmt_f64(r.w),
                    fmt_f64(r.tilt),
                    fmt_f64(r.p_hat),
                    fmt_f64(r.stderr),
                    fmt_f64(r.rate_hat),
                    r.samples.to_string(),
                    r.seed.to_string(),
                ])?;
                s.flush()
            }
            SimSink::Lines(s) => {
                s.row(&report_json(r))?;
                s.flush()
            }
        }
    }
}

pub fn simulate(inv: &Invocation) -> Result<(), CliError> {
    let cfg = inv.config.section("simulate", &inv.config.simulate)?;
    if cfg.n_set.is_empty() {
        return Err(CliError::config("simulate.n_set is empty"));
    }
    if !cfg.w.is_finite() {
        return Err(CliError::config("simulate.w must be finite"));
    }
    let pool = inv.prepare()?;
    let prov = inv.provenance();
    let dist = inv.config.dist;
    let seed = inv.config.seed;

    let mut sink = if inv.json() {
        SimSink::Lines(JsonLinesSink::create(&inv.out.join("simulate.jsonl"), &prov)?)
    } else {
        SimSink::Csv(Box::new(CsvSink::create(
            &inv.out.join("simulate.csv"),
            &prov,
            &["dist", "mode", "n", "w", "tilt", "p_hat", "stderr", "rate_hat", "samples", "seed"],
        )?))
    };

    let arrays = drivers::arrays(cfg.mode, &cfg.n_set, seed)?;
    if cfg.export_rows {
        let dir = inv.out.join("rows");
        fs::create_dir_all(&dir)?;
        for arr in &arrays {
            write_direction_row(&dir, &format!("{}_n{}", arr.mode.as_str(), arr.n), &prov, arr)?;
        }
    }

    let mut reports = Vec::with_capacity(arrays.len());
    for arr in &arrays {
        let r = pool.install(|| drivers::estimate(dist, arr, cfg.w, cfg.samples, seed, cfg.chunk_size))?;
        if let Some(msg) = &r.warning {
            eprintln!("{}", json!({ "warning": msg, "n": r.n }));
        }
        sink.write(&r)?;
        reports.push(r);
    }

    let reference = cfg.reference.or_else(|| default_reference(cfg.mode));
    let (label, value) = match reference {
        Some(kind) => {
            let t = pool.install(|| drivers::rate_table(dist, kind, &[cfg.w]))?;
            (kind.as_str(), t.results[0].value)
        }
        None => ("Chi0", if cfg.w == 0.0 { 0.0 } else { f64::INFINITY }),
    };
    let gaps: Vec<f64> = reports.iter().map(|r| (r.rate_hat - value).abs()).collect();
    let decreasing = gaps.windows(2).all(|p| p[1] < p[0]);
    let rows: Vec<Value> = reports
        .iter()
        .zip(&gaps)
        .map(|(r, &g)| {
            json!({
                "n": r.n,
                "rate_hat": num(r.rate_hat),
                "rate_stderr": num(r.rate_stderr),
                "abs_gap": num(g),
                "relative_gap": num(g / value),
            })
        })
        .collect();
    write_json(
        &inv.out.join("simulate_summary.json"),
        &prov,
        json!({
            "dist": dist,
            "mode": cfg.mode.as_str(),
            "w": num(cfg.w),
            "reference": label,
            "reference_value": num(value),
            "reference_infinite": value.is_infinite(),
            "rows": rows,
            "gap_decreasing": decreasing,
        }),
    )
}

pub fn lmgf(inv: &Invocation) -> Result<(), CliError> {
    let cfg = inv.config.section("lmgf", &inv.config.lmgf)?;
    if cfg.seed_count == 0 {
        return Err(CliError::config("lmgf.seed_count must be at least 1"));
    }
    if !cfg.mode.is_gaussian() {
        return Err(CliError::config(format!("lmgf.mode must be a Gaussian array mode, got {}", cfg.mode)));
    }
    let pool = inv.prepare()?;
    let prov = inv.provenance();
    let dist = inv.config.dist;

    let rows =
        pool.install(|| drivers::profile(dist, cfg.mode, inv.config.seed, cfg.seed_count, &cfg.t_set, &cfg.n_set))?;
    let medians = median_gaps(&rows);
    let e1 = cfg
        .e1_n_set
        .iter()
        .flat_map(|&n| cfg.t_set.iter().map(move |&t| (n, t)))
        .map(|(n, t)| e1_lmgf(dist, n, t).map(|v| (n, t, v)))
        .collect::<Result<Vec<_>, _>>()?;

    if inv.json() {
        let rows: Vec<Value> =
            rows.iter().map(|r| json!({ "n": r.n, "t": num(r.t), "gap": num(r.gap), "seed": r.seed })).collect();
        write_json(&inv.file("profile"), &prov, json!({ "mode": cfg.mode.as_str(), "rows": rows }))?;
        let e1: Vec<Value> = e1.iter().map(|&(n, t, v)| json!({ "n": n, "t": num(t), "value": num(v) })).collect();
        write_json(&inv.file("e1"), &prov, json!({ "rows": e1 }))?;
    } else {
        let mut s = CsvSink::create(&inv.file("profile"), &prov, &["n", "t", "gap", "seed"])?;
        for r in &rows {
            s.row([r.n.to_string(), fmt_f64(r.t), fmt_f64(r.gap), r.seed.to_string()])?;
        }
        s.flush()?;
        let mut s = CsvSink::create(&inv.file("e1"), &prov, &["n", "t", "value"])?;
        for &(n, t, v) in &e1 {
            s.row([n.to_string(), fmt_f64(t), fmt_f64(v)])?;
        }
        s.flush()?;
    }
    let medians: Vec<Value> = medians
        .iter()
        .map(|m| json!({ "n": m.n, "t": num(m.t), "median_gap": num(m.median), "seeds": m.seeds }))
        .collect();
    write_json(&inv.out.join("profile_medians.json"), &prov, json!({ "mode": cfg.mode.as_str(), "medians": medians }))
}
