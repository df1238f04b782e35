//! Result-document assembly and file emission.
//!
//! `results.json` is byte-identical across runs with the same config and
//! seed: field order is fixed by the struct layout, maps are ordered, and
//! nothing time- or path-dependent is recorded.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use diffusionlab::stability::FunctionalSeries;
use diffusionlab::{ConditionReport, FrontReport};

use crate::Failure;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One named threshold comparison contributing to the run status.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

impl Check {
    pub fn upper(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value <= threshold, value, threshold }
    }

    pub fn lower(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value >= threshold, value, threshold }
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        Self { name: name.into(), passed: ok, value: if ok { 1.0 } else { 0.0 }, threshold: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub row: usize,
    pub status: RowStatus,
    pub directory: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// The machine-readable result document written as `results.json`.
#[derive(Debug, Serialize)]
pub struct ResultsDoc {
    pub schema_version: u64,
    pub kind: String,
    pub seed: u64,
    pub status: Status,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reports: Vec<ConditionReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub scalars: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub series_files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub front_report: Option<FrontReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<SweepRow>,
}

impl ResultsDoc {
    pub fn new(kind: &str, seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: kind.into(),
            seed,
            status: Status::Pass,
            reports: Vec::new(),
            checks: Vec::new(),
            scalars: BTreeMap::new(),
            series_files: Vec::new(),
            plot_file: None,
            front_report: None,
            rows: Vec::new(),
        }
    }

    pub fn push_check(&mut self, check: Check) {
        if !check.passed {
            self.status = Status::Fail;
        }
        self.checks.push(check);
    }

    pub fn scalar(&mut self, name: &str, value: f64) {
        self.scalars.insert(name.into(), value);
    }

    pub fn to_pretty_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("results serialize");
        s.push('\n');
        s
    }
}

/// A directory the run writes its artifacts into.
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(path: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(path)
            .map_err(|e| Failure::runtime(format!("cannot create output directory: {e}")))?;
        Ok(Self { root: path.to_path_buf() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<(), Failure> {
        fs::write(self.root.join(name), contents)
            .map_err(|e| Failure::runtime(format!("cannot write {name}: {e}")))
    }

    pub fn write_results(&self, doc: &ResultsDoc) -> Result<(), Failure> {
        self.write("results.json", &doc.to_pretty_json())
    }

    /// `(t, Y)` series, optionally with envelope and margin columns
    /// (margin = (1+slack)·envelope − Y, nonnegative exactly when the
    /// sample is dominated).
    pub fn write_series_csv(
        &self,
        name: &str,
        series: &FunctionalSeries,
        envelope: Option<(&[f64], f64)>,
    ) -> Result<(), Failure> {
        let mut out = String::new();
        match envelope {
            Some((env, slack)) => {
                out.push_str("t,Y,envelope,margin\n");
                for ((&t, &y), &e) in series.times.iter().zip(&series.values).zip(env) {
                    let margin = (1.0 + slack) * e - y;
                    out.push_str(&format!("{t},{y},{e},{margin}\n"));
                }
            }
            None => {
                out.push_str("t,Y\n");
                for (&t, &y) in series.times.iter().zip(&series.values) {
                    out.push_str(&format!("{t},{y}\n"));
                }
            }
        }
        self.write(name, &out)
    }

    pub fn write_table_csv(
        &self,
        name: &str,
        header: &str,
        rows: impl Iterator<Item = String>,
    ) -> Result<(), Failure> {
        let mut out = String::with_capacity(4096);
        out.push_str(header);
        out.push('\n');
        for r in rows {
            out.push_str(&r);
            out.push('\n');
        }
        self.write(name, &out)
    }
}

/// Writes the structured error report for a failed invocation.
pub fn write_error_report(f: &Failure) {
    let doc = serde_json::json!({
        "error": {
            "phase": f.phase(),
            "message": f.message(),
            "missing": f.missing(),
        }
    });
    let mut stderr = std::io::stderr();
    let _ = writeln!(stderr, "{}", serde_json::to_string_pretty(&doc).expect("error serialize"));
}
