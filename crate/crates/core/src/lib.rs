//! Axiomatic test bench for online binary sequence predictors.
//!
//! A model is a black box that predicts the next `L`-bit input and updates
//! on the realised one. The harness checks it against twelve axioms using
//! seeded random trials and reports a pass/fail verdict for each.

pub mod axioms;
pub mod cli;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod model;
pub mod registry;
pub mod report;
pub mod signals;
pub mod stats;

pub use axioms::{run_all, run_all_with_threads, run_test, TestResult};
pub use config::{Mode, TestConfig};
pub use error::{HarnessError, Result};
pub use fixtures::{make_fixture, make_fixture_by_name, Variant};
pub use model::{Fingerprint, LearnOutcome, Model, ModelFactory};
pub use registry::{register_model, resolve_model};
pub use report::Report;
pub use signals::{Input, Sequence};
