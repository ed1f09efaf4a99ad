//! Machine-readable verification reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize};

use crate::operators::ExperimentResult;

// JSON has no NaN; serde_json writes it as null.
fn null_as_nan<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

fn nulls_as_nan<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    Ok(Vec::<Option<f64>>::deserialize(d)?.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect())
}

/// One checked case of a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub label: String,
    pub inputs: BTreeMap<String, String>,
    #[serde(deserialize_with = "null_as_nan")]
    pub computed: f64,
    pub expected: Option<f64>,
    /// Ratios of a ratio-constancy case, in case order.
    #[serde(deserialize_with = "nulls_as_nan")]
    pub ratios: Vec<f64>,
    pub error_estimate: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    pub note: String,
}

impl CaseRecord {
    pub fn new(label: impl Into<String>) -> Self {
        CaseRecord {
            label: label.into(),
            inputs: BTreeMap::new(),
            computed: f64::NAN,
            expected: None,
            ratios: Vec::new(),
            error_estimate: None,
            tolerance: None,
            pass: false,
            note: String::new(),
        }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_error(mut self, err: f64) -> Self {
        self.error_estimate = Some(err);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// Passes when `|computed / expected - 1| <= tol`, or `|computed| <= tol` for a zero oracle.
    pub fn relative(mut self, computed: f64, expected: f64, tol: f64) -> Self {
        let err = if expected == 0.0 { computed.abs() } else { (computed / expected - 1.0).abs() };
        self.computed = computed;
        self.expected = Some(expected);
        self.tolerance = Some(tol);
        self.pass = err <= tol;
        self
    }

    /// Passes when `|computed - expected| <= tol`.
    pub fn absolute(mut self, computed: f64, expected: f64, tol: f64) -> Self {
        self.computed = computed;
        self.expected = Some(expected);
        self.tolerance = Some(tol);
        self.pass = (computed - expected).abs() <= tol;
        self
    }

    /// `computed` is the coefficient of variation of `ratios`; passes below `tol`.
    pub fn constancy(mut self, ratios: Vec<f64>, tol: f64) -> Self {
        let n = ratios.len() as f64;
        let mean = ratios.iter().sum::<f64>() / n;
        let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
        self.computed = var.sqrt() / mean.abs();
        self.ratios = ratios;
        self.tolerance = Some(tol);
        self.pass = self.computed < tol;
        self
    }

    pub fn verdict(mut self, computed: f64, pass: bool) -> Self {
        self.computed = computed;
        self.pass = pass;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub cone: String,
    pub params: BTreeMap<String, String>,
    /// The quadrature spec in `key=value` form.
    pub quadrature: String,
    pub tol: f64,
    pub seed: u64,
    pub cases: Vec<CaseRecord>,
    pub experiments: Vec<serde_json::Value>,
    pub aggregate_pass: bool,
    pub wall_time_s: f64,
}

impl VerificationReport {
    pub fn push_experiment(&mut self, e: &ExperimentResult) {
        self.experiments.push(serde_json::to_value(e).expect("experiment results serialize"));
    }

    /// Conjunction of the case passes; false for an empty report.
    pub fn finish(&mut self) {
        self.aggregate_pass = !self.cases.is_empty() && self.cases.iter().all(|c| c.pass);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// `suite,label,computed,expected,error_estimate,tolerance,pass,note`.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["suite", "label", "computed", "expected", "error_estimate", "tolerance", "pass", "note"])
            .expect("in-memory write");
        for c in &self.cases {
            w.write_record([
                self.suite.as_str(),
                c.label.as_str(),
                &c.computed.to_string(),
                &opt(c.expected),
                &opt(c.error_estimate),
                &opt(c.tolerance),
                &c.pass.to_string(),
                c.note.as_str(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    /// One line per case and a verdict.
    pub fn summary(&self) -> String {
        let mut out = format!("suite {} on {}\n", self.suite, self.cone);
        for c in &self.cases {
            let exp = c.expected.map_or(String::new(), |e| format!(" expected {e:.10}"));
            out.push_str(&format!(
                "  [{}] {}: computed {:.10}{exp}\n",
                if c.pass { "pass" } else { "FAIL" },
                c.label,
                c.computed
            ));
        }
        out.push_str(&format!(
            "{} ({:.2} s)\n",
            if self.aggregate_pass { "PASS" } else { "FAIL" },
            self.wall_time_s
        ));
        out
    }
}
