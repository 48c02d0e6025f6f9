//! Report records (JSON) and tables (CSV).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use bilab_lab::FitReport;

use crate::config::ExperimentConfig;

/// A named hard assertion of a suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()
    }
}

/// Shortest round-trip form (exponent notation for very small or large
/// values), with `inf`, `-inf` and `nan` spelled out.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        serde_json::to_string(&v).expect("finite floats serialize")
    }
}

/// What a suite measured. Timings are kept apart because they vary between runs.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub scalars: BTreeMap<String, f64>,
    pub fits: Vec<FitReport>,
    pub assertions: Vec<Assertion>,
    pub table: Option<Table>,
    pub timings: BTreeMap<String, f64>,
}

impl Outcome {
    pub fn scalar(&mut self, key: &str, v: f64) {
        self.scalars.insert(key.to_string(), v);
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion::new(name, pass, detail));
    }

    /// Records a fit and asserts its verdict.
    pub fn fit(&mut self, f: FitReport) {
        let detail = format!("fitted {:.3} vs predicted {:.3} ({:?}, tol {})", f.fitted, f.predicted, f.claim, f.tolerance);
        self.check(&f.experiment.clone(), f.pass, detail);
        self.fits.push(f);
    }

    pub fn pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }
}

#[derive(Serialize)]
struct Record<'a> {
    experiment: &'a str,
    config: &'a ExperimentConfig,
    pass: bool,
    scalars: BTreeMap<&'a str, serde_json::Value>,
    fits: &'a [FitReport],
    assertions: &'a [Assertion],
    table: Option<String>,
    timings: &'a BTreeMap<String, f64>,
    wall_clock_seconds: f64,
}

fn value(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::json!(num(v))
    }
}

/// Writes `<out>/<id>.json`, and `<out>/<id>.csv` when the suite produced a table.
pub fn write(config: &ExperimentConfig, outcome: &Outcome, seconds: f64) -> std::io::Result<(PathBuf, Option<PathBuf>)> {
    fs::create_dir_all(&config.out)?;
    let id = config.experiment.id();
    let csv_path = match &outcome.table {
        Some(t) => {
            let p = config.out.join(format!("{id}.csv"));
            t.write(&p)?;
            Some(p)
        }
        None => None,
    };
    let record = Record {
        experiment: id,
        config,
        pass: outcome.pass(),
        scalars: outcome.scalars.iter().map(|(k, v)| (k.as_str(), value(*v))).collect(),
        fits: &outcome.fits,
        assertions: &outcome.assertions,
        table: csv_path.as_ref().and_then(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()),
        timings: &outcome.timings,
        wall_clock_seconds: seconds,
    };
    let json_path = config.out.join(format!("{id}.json"));
    let text = serde_json::to_string_pretty(&record).map_err(std::io::Error::other)?;
    fs::write(&json_path, text + "\n")?;
    Ok((json_path, csv_path))
}
