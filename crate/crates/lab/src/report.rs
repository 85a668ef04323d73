//! Experiment reports: a fixed-schema table, the criteria it was judged
//! against, and any rasters worth keeping.

use dynlab_core::measure::GridField;
use serde::Serialize;

use crate::config::ExperimentId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    MeasuredFail,
    NumericalFailure,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::MeasuredFail => 1,
            Verdict::NumericalFailure => 3,
        }
    }
}

/// One acceptance criterion. `measured` is `None` when the quantity could
/// not be computed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: Option<f64>,
    pub threshold: String,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, measured: Option<f64>, limit: f64) -> Check {
        Check {
            name: name.into(),
            measured,
            threshold: format!("<= {limit}"),
            passed: measured.is_some_and(|m| m <= limit),
        }
    }

    pub fn below(name: &str, measured: Option<f64>, limit: f64) -> Check {
        Check {
            name: name.into(),
            measured,
            threshold: format!("< {limit}"),
            passed: measured.is_some_and(|m| m < limit),
        }
    }

    pub fn above(name: &str, measured: Option<f64>, limit: f64) -> Check {
        Check {
            name: name.into(),
            measured,
            threshold: format!("> {limit}"),
            passed: measured.is_some_and(|m| m > limit),
        }
    }

    pub fn at_least(name: &str, measured: Option<f64>, limit: f64) -> Check {
        Check {
            name: name.into(),
            measured,
            threshold: format!(">= {limit}"),
            passed: measured.is_some_and(|m| m >= limit),
        }
    }

    pub fn holds(name: &str, ok: Option<bool>, what: &str) -> Check {
        Check {
            name: name.into(),
            measured: ok.map(|b| if b { 1.0 } else { 0.0 }),
            threshold: what.into(),
            passed: ok == Some(true),
        }
    }
}

pub struct NamedField {
    pub name: String,
    pub field: GridField,
}

pub struct Report {
    pub experiment: ExperimentId,
    pub config_hash: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub checks: Vec<Check>,
    pub fields: Vec<NamedField>,
    /// Free-form remarks (e.g. how to read a consistency-only result).
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(experiment: ExperimentId, config_hash: String, columns: &[&'static str]) -> Report {
        let mut cols = vec!["config_hash"];
        cols.extend_from_slice(columns);
        Report {
            experiment,
            config_hash,
            columns: cols,
            rows: Vec::new(),
            checks: Vec::new(),
            fields: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push_row(&mut self, values: Vec<String>) {
        assert_eq!(values.len() + 1, self.columns.len(), "row width for {}", self.experiment.name());
        let mut row = vec![self.config_hash.clone()];
        row.extend(values);
        self.rows.push(row);
    }

    pub fn add_field(&mut self, name: impl Into<String>, field: GridField) {
        self.fields.push(NamedField { name: name.into(), field });
    }

    pub fn verdict(&self) -> Verdict {
        if self.checks.iter().any(|c| c.measured.is_none()) {
            Verdict::NumericalFailure
        } else if self.checks.iter().all(|c| c.passed) {
            Verdict::Pass
        } else {
            Verdict::MeasuredFail
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// CSV body; identical configs give identical bytes.
    pub fn csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_precedence() {
        let mut r = Report::new(ExperimentId::E4, "h".into(), &["a"]);
        r.checks.push(Check::at_least("x", Some(1.0), 0.5));
        assert_eq!(r.verdict(), Verdict::Pass);
        r.checks.push(Check::below("y", Some(2.0), 1.0));
        assert_eq!(r.verdict(), Verdict::MeasuredFail);
        r.checks.push(Check::below("z", None, 1.0));
        assert_eq!(r.verdict(), Verdict::NumericalFailure);
    }

    #[test]
    fn csv_has_hash_column() {
        let mut r = Report::new(ExperimentId::E4, "abc".into(), &["n", "v"]);
        r.push_row(vec!["1".into(), num(0.1)]);
        assert_eq!(String::from_utf8(r.csv()).unwrap(), "config_hash,n,v\nabc,1,0.1\n");
    }
}
