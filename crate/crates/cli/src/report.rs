use crate::config::Scenario;
use bootstrap_core::Tolerances;
use serde::Serialize;
use serde_json::Value;

pub const FORMAT: &str = "verify-report";

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// Only gated checks decide the exit code; the rest are recorded observations.
    pub gated: bool,
    pub pass: bool,
    pub value: Option<f64>,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub gated: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub format: &'static str,
    pub version: &'static str,
    pub scenario: Scenario,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub backend: Value,
    pub cover: Value,
    pub checks: Vec<Check>,
    pub summary: Summary,
    pub pass: bool,
}

/// Checks accumulated by a scenario, in execution order.
#[derive(Default)]
pub struct Checks(pub Vec<Check>);

impl Checks {
    pub fn gate(&mut self, name: impl Into<String>, pass: bool, value: Option<f64>, detail: Value) {
        self.0.push(Check { name: name.into(), gated: true, pass, value, detail });
    }

    pub fn note(&mut self, name: impl Into<String>, value: Option<f64>, detail: Value) {
        self.0.push(Check { name: name.into(), gated: false, pass: true, value, detail });
    }
}

impl Report {
    pub fn new(scenario: Scenario, seed: u64, tolerances: Tolerances, backend: Value, cover: Value, checks: Checks) -> Self {
        let checks = checks.0;
        let gated = checks.iter().filter(|c| c.gated).count();
        let failed = checks.iter().filter(|c| c.gated && !c.pass).count();
        Report {
            format: FORMAT,
            version: env!("CARGO_PKG_VERSION"),
            scenario,
            seed,
            tolerances,
            backend,
            cover,
            summary: Summary { checks: checks.len(), gated, failed },
            pass: failed == 0,
            checks,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }
}
