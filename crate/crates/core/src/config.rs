use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::signals::MAX_WIDTH;

/// Divisor applied to `simulated_infinity` in smoke mode.
pub const SMOKE_FACTOR: u64 = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Full,
    Smoke,
}

/// Harness parameters. Every field is echoed into the report, and together
/// with the model they fix every non-timing verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    /// Channels per input.
    pub input_size: usize,
    /// Length of the periodic patterns most tests use.
    pub pattern_period: usize,
    /// Finite stand-in for unbounded quantifiers: trial count, step count and
    /// per-sequence learning budget (in passes).
    pub simulated_infinity: u64,
    /// Independent runs averaged inside one denoising/generalisation trial.
    pub runs_per_trial: usize,
    /// Prefix-to-target length ratio for the generalisation test.
    pub rho: usize,
    /// A timing batch is grown until it takes at least this long.
    pub timing_resolution_floor_s: f64,
    pub batches_per_timing_trial: usize,
    /// Share of structured (worst-case probe) inputs in a timing batch.
    pub structured_input_fraction: f64,
    /// One-sided Wilcoxon z at or above which a timing trial fails.
    pub z_threshold: f64,
    /// Cap on training passes before the denoising probe.
    pub denoise_max_passes: u64,
    /// Extra attempts, each with twice the batches, when a timing trial is
    /// indeterminate.
    pub timing_max_retries: u32,
    /// Optional absolute bound on mean seconds per update; off by default.
    pub max_update_seconds: Option<f64>,
    pub master_seed: u64,
    pub mode: Mode,
    pub early_exit: bool,
    pub skip_timing: bool,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            input_size: 10,
            pattern_period: 7,
            simulated_infinity: 5000,
            runs_per_trial: 20,
            rho: 10,
            timing_resolution_floor_s: 100e-6,
            batches_per_timing_trial: 100,
            structured_input_fraction: 0.2,
            z_threshold: 3.090,
            denoise_max_passes: 500,
            timing_max_retries: 3,
            max_update_seconds: None,
            master_seed: 0,
            mode: Mode::Full,
            early_exit: false,
            skip_timing: false,
        }
    }
}

impl TestConfig {
    /// Default configuration scaled down by [`SMOKE_FACTOR`].
    pub fn smoke() -> Self {
        TestConfig::default().with_mode(Mode::Smoke)
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        let full = TestConfig::default().simulated_infinity;
        self.mode = mode;
        self.simulated_infinity = match mode {
            Mode::Full => full,
            Mode::Smoke => (full / SMOKE_FACTOR).max(1),
        };
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.simulated_infinity = trials;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(HarnessError::Usage(msg));
        if self.input_size == 0 || self.input_size > MAX_WIDTH {
            return fail(format!("input_size must be in 1..={MAX_WIDTH}"));
        }
        if self.pattern_period < 2 {
            return fail("pattern_period must be >= 2".into());
        }
        if self.simulated_infinity == 0 {
            return fail("simulated_infinity must be >= 1".into());
        }
        if self.runs_per_trial == 0 {
            return fail("runs_per_trial must be >= 1".into());
        }
        if self.rho < 2 {
            return fail("rho must be >= 2".into());
        }
        if !(0.0..=1.0).contains(&self.structured_input_fraction) {
            return fail("structured_input_fraction must be in [0, 1]".into());
        }
        if self.timing_resolution_floor_s.is_nan() || self.timing_resolution_floor_s <= 0.0 {
            return fail("timing_resolution_floor_s must be positive".into());
        }
        if self.batches_per_timing_trial == 0 || self.denoise_max_passes == 0 {
            return fail("batch and pass counts must be positive".into());
        }
        Ok(())
    }
}
