use std::io::Write;

use serde::Serialize;

use crate::error::Result;

pub const CSV_HEADER: &str = "scenario,trial,x_key,x_value,quantity,value";

/// Trials are numbered from 1; constants such as L(0) are repeated per trial.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub trial: u64,
    pub x_key: &'static str,
    pub x_value: f64,
    pub quantity: &'static str,
    pub value: f64,
}

#[derive(Clone, Debug, Default)]
pub struct ResultTable {
    pub scenario: &'static str,
    pub rows: Vec<Row>,
}

/// Rows of one trial at one x value.
#[derive(Clone, Debug)]
pub struct RowSink {
    pub trial: u64,
    pub x_key: &'static str,
    pub x_value: f64,
    pub rows: Vec<Row>,
}

impl RowSink {
    pub fn new(trial: u64, x_key: &'static str, x_value: f64) -> Self {
        RowSink { trial, x_key, x_value, rows: Vec::new() }
    }

    pub fn at(&mut self, x_value: f64) -> &mut Self {
        self.x_value = x_value;
        self
    }

    pub fn put(&mut self, quantity: &'static str, value: f64) -> &mut Self {
        self.rows.push(Row { trial: self.trial, x_key: self.x_key, x_value: self.x_value, quantity, value });
        self
    }
}

impl ResultTable {
    pub fn new(scenario: &'static str) -> Self {
        ResultTable { scenario, rows: Vec::new() }
    }

    pub fn extend(&mut self, rows: impl IntoIterator<Item = Row>) {
        self.rows.extend(rows);
    }

    /// Stable sort by (trial, x_value); quantity order within a point is kept.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| a.trial.cmp(&b.trial).then(a.x_value.total_cmp(&b.x_value)));
    }

    pub fn values<'a>(&'a self, quantity: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.quantity == quantity)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut w: W, metadata: &[(String, String)]) -> Result<()> {
        for (k, v) in metadata {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                self.scenario,
                r.trial,
                r.x_key,
                fmt_float(r.x_value),
                r.quantity,
                fmt_float(r.value)
            )?;
        }
        Ok(())
    }
}

/// 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub nominal: f64,
    pub observed: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: &'static str,
    pub checks: Vec<Check>,
}

impl Summary {
    pub fn new(scenario: &'static str) -> Self {
        Summary { scenario, checks: Vec::new() }
    }

    /// observed ≤ nominal.
    pub fn at_most(&mut self, name: impl Into<String>, nominal: f64, observed: f64) {
        self.checks.push(Check { name: name.into(), nominal, observed, pass: observed <= nominal });
    }

    /// observed ≥ nominal.
    pub fn at_least(&mut self, name: impl Into<String>, nominal: f64, observed: f64) {
        self.checks.push(Check { name: name.into(), nominal, observed, pass: observed >= nominal });
    }

    /// |observed − nominal| ≤ tol.
    pub fn within(&mut self, name: impl Into<String>, nominal: f64, observed: f64, tol: f64) {
        self.checks.push(Check { name: name.into(), nominal, observed, pass: (observed - nominal).abs() <= tol });
    }

    /// lo ≤ observed ≤ hi; the midpoint is reported as nominal.
    pub fn in_range(&mut self, name: impl Into<String>, lo: f64, hi: f64, observed: f64) {
        let pass = observed >= lo && observed <= hi;
        self.checks.push(Check { name: name.into(), nominal: 0.5 * (lo + hi), observed, pass });
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}
