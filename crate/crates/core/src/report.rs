//! Machine-readable run reports.

use std::path::Path;

use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    /// How `value` is compared with `bound`.
    pub relation: Relation,
    pub pass: bool,
    /// Whether a failure counts against the run.
    pub gating: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub seed: u64,
    pub tolerance: f64,
    pub checks: Vec<Check>,
    /// Command-specific measurements.
    pub details: serde_json::Value,
    pub notes: Vec<String>,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn new(command: Vec<String>, seed: u64, tolerance: f64) -> Self {
        Self {
            command,
            seed,
            tolerance,
            checks: Vec::new(),
            details: serde_json::Value::Null,
            notes: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn at_most(&mut self, name: impl Into<String>, value: f64, bound: f64) -> bool {
        self.push(name, value, bound, Relation::AtMost, value <= bound)
    }

    pub fn at_least(&mut self, name: impl Into<String>, value: f64, bound: f64) -> bool {
        self.push(name, value, bound, Relation::AtLeast, value >= bound)
    }

    /// Exact equality of counts and other integer-valued quantities.
    pub fn equal(&mut self, name: impl Into<String>, value: f64, expected: f64) -> bool {
        self.push(name, value, expected, Relation::Equal, value == expected)
    }

    fn push(&mut self, name: impl Into<String>, value: f64, bound: f64, relation: Relation, pass: bool) -> bool {
        self.checks.push(Check { name: name.into(), value, bound, relation, pass, gating: true });
        pass
    }

    /// Records the next check as gating or informational.
    pub fn gated(&mut self, gating: bool) -> Gated<'_> {
        Gated { report: self, gating }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass || !c.gating)
    }

    /// Gating checks that failed.
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass && c.gating)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One CSV row per check.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
        for c in &self.checks {
            w.serialize(c).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub struct Gated<'a> {
    report: &'a mut RunReport,
    gating: bool,
}

impl Gated<'_> {
    fn mark(self, pass: bool) -> bool {
        if let Some(c) = self.report.checks.last_mut() {
            c.gating = self.gating;
        }
        pass
    }

    pub fn at_most(self, name: impl Into<String>, value: f64, bound: f64) -> bool {
        let pass = self.report.at_most(name, value, bound);
        self.mark(pass)
    }

    pub fn at_least(self, name: impl Into<String>, value: f64, bound: f64) -> bool {
        let pass = self.report.at_least(name, value, bound);
        self.mark(pass)
    }

    pub fn equal(self, name: impl Into<String>, value: f64, expected: f64) -> bool {
        let pass = self.report.equal(name, value, expected);
        self.mark(pass)
    }
}

fn csv_error(e: csv::Error) -> crate::Error {
    crate::Error::Io(std::io::Error::other(e.to_string()))
}
