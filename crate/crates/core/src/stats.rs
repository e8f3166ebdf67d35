//! One-sided Wilcoxon signed-rank statistics and the small helpers the
//! stress tests need.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{HarnessError, Result};

/// Fewest nonzero differences for which a z value is reported.
pub const MIN_NONZERO: usize = 5;

/// Largest sample the exact enumeration accepts.
pub const EXACT_MAX_N: usize = 14;

/// Paired differences (trained minus blank), in seconds.
#[derive(Clone, Debug, PartialEq)]
pub struct PairedSample {
    diffs: Vec<f64>,
}

impl PairedSample {
    pub fn new(diffs: Vec<f64>) -> Result<Self> {
        if diffs.iter().any(|d| !d.is_finite()) {
            return Err(HarnessError::usage("paired differences must be finite"));
        }
        Ok(PairedSample { diffs })
    }

    pub fn from_pairs(trained: &[f64], blank: &[f64]) -> Result<Self> {
        if trained.len() != blank.len() {
            return Err(HarnessError::usage("paired samples differ in length"));
        }
        PairedSample::new(trained.iter().zip(blank).map(|(t, b)| t - b).collect())
    }

    pub fn diffs(&self) -> &[f64] {
        &self.diffs
    }

    fn nonzero(&self) -> Vec<f64> {
        self.diffs.iter().copied().filter(|d| *d != 0.0).collect()
    }
}

/// Signed-rank summary of a sample after discarding zero differences.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedRanks {
    pub n: usize,
    /// Sum of (average) ranks of positive differences.
    pub w_plus: f64,
    /// `sum(t^3 - t)` over tie groups of `|d|`.
    pub tie_term: f64,
}

impl SignedRanks {
    pub fn mean(&self) -> f64 {
        let n = self.n as f64;
        n * (n + 1.0) / 4.0
    }

    pub fn variance(&self) -> f64 {
        let n = self.n as f64;
        n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - self.tie_term / 48.0
    }
}

pub fn signed_ranks(p: &PairedSample) -> SignedRanks {
    let mut values = p.nonzero();
    values.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let n = values.len();
    let mut w_plus = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[j + 1].abs() == values[i].abs() {
            j += 1;
        }
        // Positions i..=j share the average of ranks i+1..=j+1.
        let avg = (i + j + 2) as f64 / 2.0;
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        w_plus += avg * values[i..=j].iter().filter(|d| **d > 0.0).count() as f64;
        i = j + 1;
    }
    SignedRanks {
        n,
        w_plus,
        tie_term,
    }
}

/// One-sided z for "differences are systematically positive", without
/// continuity correction. Zeros are discarded and ties get average ranks
/// with the usual variance correction.
pub fn wilcoxon_one_sided_z(p: &PairedSample) -> Result<f64> {
    let r = signed_ranks(p);
    if r.n < MIN_NONZERO {
        return Err(HarnessError::usage(format!(
            "indeterminate: {} nonzero differences, need {MIN_NONZERO}",
            r.n
        )));
    }
    let var = r.variance();
    if var <= 0.0 {
        return Err(HarnessError::usage("indeterminate: zero rank variance"));
    }
    Ok((r.w_plus - r.mean()) / var.sqrt())
}

/// Upper tail of the standard normal.
pub fn normal_upper_tail(z: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").sf(z)
}

/// Normal approximation to `P(W+ >= w)` with a half-rank continuity
/// correction.
pub fn wilcoxon_normal_p(p: &PairedSample) -> Result<f64> {
    let r = signed_ranks(p);
    if r.n == 0 {
        return Err(HarnessError::usage("no nonzero differences"));
    }
    let var = r.variance();
    if var <= 0.0 {
        return Err(HarnessError::usage("zero rank variance"));
    }
    Ok(normal_upper_tail((r.w_plus - 0.5 - r.mean()) / var.sqrt()))
}

/// Exact one-sided `P(W+ >= observed)` by enumerating all sign assignments.
pub fn wilcoxon_exact_p(p: &PairedSample) -> Result<f64> {
    let values = p.nonzero();
    let n = values.len();
    if n == 0 || n > EXACT_MAX_N {
        return Err(HarnessError::usage(format!(
            "exact test needs 1..={EXACT_MAX_N} nonzero differences, got {n}"
        )));
    }
    let r = signed_ranks(p);
    if r.tie_term != 0.0 {
        return Err(HarnessError::usage(
            "exact test requires untied |differences|",
        ));
    }
    let observed = r.w_plus.round() as u64;
    let mut at_least = 0u64;
    for signs in 0u32..(1u32 << n) {
        let w: u64 = (0..n)
            .filter(|k| signs >> k & 1 == 1)
            .map(|k| k as u64 + 1)
            .sum();
        if w >= observed {
            at_least += 1;
        }
    }
    Ok(at_least as f64 / (1u64 << n) as f64)
}

pub fn mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(HarnessError::usage("mean of an empty list"));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}
