use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Where a reference value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Exact identity (Gamma-function cancellation, Gaussian moments, ...).
    ClosedForm,
    /// Asymptotic exponent or constant quoted from the analysis of the model.
    PublishedEstimate,
    /// Upper bound that the measurement must not exceed.
    Bound,
    /// Consistency relation between measured quantities (no external value).
    Consistency,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeCheck {
    pub name: String,
    pub measured: f64,
    pub reference: Option<f64>,
    pub provenance: Provenance,
    pub tolerance: Option<f64>,
    pub passed: bool,
}

/// Structured output of a probe: inputs, checks and two-column plot data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub probe: String,
    pub inputs: BTreeMap<String, serde_json::Value>,
    pub values: BTreeMap<String, f64>,
    pub checks: Vec<ProbeCheck>,
    pub plot_columns: [String; 2],
    pub plot: Vec<[f64; 2]>,
}

impl ProbeReport {
    pub fn new(probe: &str) -> Self {
        Self {
            probe: probe.to_string(),
            inputs: BTreeMap::new(),
            values: BTreeMap::new(),
            checks: Vec::new(),
            plot_columns: ["x".into(), "y".into()],
            plot: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.inputs.insert(key.to_string(), v);
        self
    }

    pub fn value(&mut self, key: &str, value: f64) -> &mut Self {
        self.values.insert(key.to_string(), value);
        self
    }

    /// Records `|measured − reference| ≤ tolerance`.
    pub fn check_close(
        &mut self,
        name: &str,
        measured: f64,
        reference: f64,
        tolerance: f64,
        provenance: Provenance,
    ) -> bool {
        let passed = (measured - reference).abs() <= tolerance;
        self.checks.push(ProbeCheck {
            name: name.to_string(),
            measured,
            reference: Some(reference),
            provenance,
            tolerance: Some(tolerance),
            passed,
        });
        passed
    }

    /// Records `measured ≤ bound`.
    pub fn check_at_most(&mut self, name: &str, measured: f64, bound: f64, provenance: Provenance) -> bool {
        let passed = measured <= bound;
        self.checks.push(ProbeCheck {
            name: name.to_string(),
            measured,
            reference: Some(bound),
            provenance,
            tolerance: None,
            passed,
        });
        passed
    }

    /// Records a boolean consistency property; `measured` is an informative value.
    pub fn check_holds(&mut self, name: &str, measured: f64, passed: bool) -> bool {
        self.checks.push(ProbeCheck {
            name: name.to_string(),
            measured,
            reference: None,
            provenance: Provenance::Consistency,
            tolerance: None,
            passed,
        });
        passed
    }

    pub fn check(&self, name: &str) -> Option<&ProbeCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn write_plot(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "{},{}", self.plot_columns[0], self.plot_columns[1])?;
        for [x, y] in &self.plot {
            writeln!(f, "{x:e},{y:e}")?;
        }
        f.flush()?;
        Ok(())
    }
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
