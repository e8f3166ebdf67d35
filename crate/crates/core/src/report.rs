//! Machine-readable run report and its human summary.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::axioms::TestResult;
use crate::config::TestConfig;
use crate::error::{HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    /// Smallest nonzero step observed on the monotonic clock.
    pub clock_resolution_ns: f64,
    pub threads: usize,
    pub harness_version: String,
}

impl Environment {
    pub fn measure(threads: usize) -> Self {
        Environment {
            clock_resolution_ns: clock_resolution_ns(),
            threads,
            harness_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

fn clock_resolution_ns() -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..100 {
        let t0 = Instant::now();
        let mut t1 = Instant::now();
        while t1 == t0 {
            t1 = Instant::now();
        }
        best = best.min((t1 - t0).as_nanos() as f64);
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub model: String,
    pub config: TestConfig,
    pub tests: Vec<TestResult>,
    /// True only when every test ran and passed.
    pub passed: bool,
    pub master_seed: u64,
    pub environment: Environment,
}

impl Report {
    pub fn new(
        model: String,
        config: TestConfig,
        tests: Vec<TestResult>,
        environment: Environment,
    ) -> Self {
        let passed = tests.len() == 12 && tests.iter().all(|t| t.passed && !t.skipped);
        Report {
            schema_version: SCHEMA_VERSION,
            model,
            config: config.clone(),
            tests,
            passed,
            master_seed: config.master_seed,
            environment,
        }
    }

    pub fn test(&self, id: u8) -> Option<&TestResult> {
        self.tests.iter().find(|t| t.axiom_id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HarnessError::usage(format!("bad report: {e}")))
    }

    /// Copy with wall-clock fields cleared: elapsed times, the environment,
    /// and the outcome of the timing test. What remains is fixed by the
    /// model, the configuration and the seed.
    pub fn masked(&self) -> Report {
        let mut r = self.clone();
        r.environment = Environment {
            clock_resolution_ns: 0.0,
            threads: 0,
            harness_version: r.environment.harness_version,
        };
        for t in &mut r.tests {
            t.elapsed_s = 0.0;
            if t.axiom_id == 12 {
                t.passed = false;
                t.trials_run = 0;
                t.first_failure_trial = None;
                t.diagnostics = String::new();
                t.timing = None;
            }
        }
        r.passed = false;
        r
    }

    /// One line per axiom in order, then the overall verdict.
    pub fn summary(&self) -> String {
        let mut out = format!("model: {}\n", self.model);
        for t in &self.tests {
            let status = if t.skipped {
                "SKIP"
            } else if t.passed {
                "PASS"
            } else {
                "FAIL"
            };
            let _ = writeln!(
                out,
                "{:>2} {:<27} {status}  {}/{} trials  {:.2}s  {}",
                t.axiom_id, t.name, t.trials_run, t.trials_required, t.elapsed_s, t.diagnostics
            );
        }
        let failed: Vec<String> = self
            .tests
            .iter()
            .filter(|t| !t.passed)
            .map(|t| t.axiom_id.to_string())
            .collect();
        if self.passed {
            out.push_str("overall: PASS\n");
        } else {
            let _ = writeln!(out, "overall: FAIL (not passed: {})", failed.join(", "));
        }
        out
    }
}
