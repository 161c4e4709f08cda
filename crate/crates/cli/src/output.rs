//! Data tables, summaries and the metadata sidecar.
//!
//! Data files contain no timestamps: identical configurations produce
//! byte-identical data and summary files. Run metadata goes to a separate
//! sidecar.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// Column-oriented numeric table. Column names carry their units.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        let mut line = String::new();
        for row in &self.rows {
            line.clear();
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{v:?}"));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    fn write_json(&self, w: &mut impl Write) -> std::io::Result<()> {
        serde_json::to_writer(
            &mut *w,
            &json!({ "columns": self.columns, "rows": self.rows }),
        )?;
        writeln!(w)
    }

    pub fn write(&self, dir: &Path, format: Format) -> Result<PathBuf, CliError> {
        let ext = match format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let path = dir.join(format!("{}.{ext}", self.name));
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        match format {
            Format::Csv => self.write_csv(&mut w),
            Format::Json => self.write_json(&mut w),
        }
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

/// Named tolerance check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    /// `"absolute"` or `"relative"`
    pub mode: &'static str,
    pub pass: bool,
}

impl Check {
    pub fn absolute(name: &str, value: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected,
            tolerance,
            mode: "absolute",
            pass: (value - expected).abs() <= tolerance,
        }
    }

    pub fn relative(name: &str, value: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected,
            tolerance,
            mode: "relative",
            pass: (value - expected).abs() <= tolerance * expected.abs(),
        }
    }

    /// `value <= bound`.
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: 0.0,
            tolerance: bound,
            mode: "absolute",
            pass: value.abs() <= bound,
        }
    }
}

/// Summary of one scenario run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub scattering_probability: Option<serde_json::Value>,
    pub norm_checks: Vec<Check>,
    pub checks: Vec<Check>,
    pub residuals: serde_json::Map<String, serde_json::Value>,
    pub results: serde_json::Map<String, serde_json::Value>,
}

impl Summary {
    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.into(), json!(value));
    }

    pub fn residual(&mut self, key: &str, value: impl Serialize) {
        self.residuals.insert(key.into(), json!(value));
    }

    pub fn failed(&self) -> Vec<String> {
        self.norm_checks
            .iter()
            .chain(&self.checks)
            .filter(|c| !c.pass)
            .map(|c| c.name.clone())
            .collect()
    }

    /// `length` is the effective pulse length, which for pulse files may
    /// come from the file itself.
    pub fn to_json(
        &self,
        cfg: &RunConfig,
        length: f64,
        cross_section: f64,
        files: &[String],
    ) -> serde_json::Value {
        let mut v = json!({
            "scenario": cfg.scenario.name(),
            "parameters": {
                "gamma": cfg.gamma,
                "c": cfg.c,
                "L": length,
                "dx": cfg.grid.dx,
                "padding": cfg.grid.padding,
                "alpha": cfg.alpha,
                "pulse": &cfg.pulse,
            },
            "cross_section": cross_section,
            "norm_checks": &self.norm_checks,
            "checks": &self.checks,
            "residuals": &self.residuals,
            "results": &self.results,
            "files": files,
            "pass": self.failed().is_empty(),
        });
        if let Some(p) = &self.scattering_probability {
            v["scattering_probability"] = p.clone();
        }
        v
    }
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
