//! The twelve axiom tests and the run-all driver.
//!
//! Stress tests (1, 2, 4–7, 10–12) must pass every one of their trials.
//! Tests 8 and 9 are existence searches: they pass on the first witness and
//! fail only when the attempt budget runs out. Trials are seeded from
//! `(master_seed, axiom, trial)` and may run in parallel; the first failing
//! trial by index is reported, so verdicts do not depend on scheduling.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::TestConfig;
use crate::error::{HarnessError, Result};
use crate::model::{self, autoregress, clone_model, feed, fingerprint, learn, Model, ModelFactory};
use crate::report::{Environment, Report};
use crate::signals::{
    corrupt, derive_seed, is_admissible, match_score, random_admissible, random_input, seeded_rng,
    width_mask, Input, Rng, Sequence,
};
use crate::stats::{mean, wilcoxon_one_sided_z, PairedSample};

/// Longest random sequence the determinism test feeds, as a multiple of the
/// pattern period.
pub const DETERMINISM_LENGTH_MULTIPLE: usize = 4;

/// Length of the random history that builds a context model in test 6(b),
/// as a multiple of the pattern period.
pub const CONTEXT_LENGTH_MULTIPLE: usize = 4;

/// Redraws allowed when two prefixes in test 9 produce equal models.
pub const PREFIX_REDRAWS: usize = 16;

pub const AXIOM_NAMES: [&str; 12] = [
    "uninformed start",
    "determinism",
    "trace",
    "time",
    "absolute refractory period",
    "inevitable saturation",
    "temporal adaptability",
    "content sensitivity",
    "context sensitivity",
    "denoising",
    "generalisation",
    "real-time liveness",
];

pub fn axiom_name(id: u8) -> &'static str {
    AXIOM_NAMES[usize::from(id) - 1]
}

/// Statistics of the liveness test. Wall-clock derived.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingSummary {
    pub batch_size: usize,
    pub max_z: f64,
    pub mean_z: f64,
    pub retried_trials: u64,
    pub blank_update_ns: f64,
    pub complex_update_ns: f64,
}

/// Verdict of one axiom test. `passed` holds exactly when no trial failed
/// and `trials_run == trials_required`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub axiom_id: u8,
    pub name: String,
    pub passed: bool,
    pub skipped: bool,
    pub trials_required: u64,
    pub trials_run: u64,
    pub first_failure_trial: Option<u64>,
    pub diagnostics: String,
    pub elapsed_s: f64,
    pub timing: Option<TimingSummary>,
}

impl TestResult {
    fn new(axiom_id: u8, trials_required: u64) -> Self {
        TestResult {
            axiom_id,
            name: axiom_name(axiom_id).to_string(),
            passed: false,
            skipped: false,
            trials_required,
            trials_run: 0,
            first_failure_trial: None,
            diagnostics: String::new(),
            elapsed_s: 0.0,
            timing: None,
        }
    }

    /// A test that did not run. It counts as not passed.
    pub fn skipped(axiom_id: u8, trials_required: u64, reason: &str) -> Self {
        TestResult {
            skipped: true,
            diagnostics: format!("skipped: {reason}"),
            ..TestResult::new(axiom_id, trials_required)
        }
    }

    fn finish_stress(mut self, outcome: StressOutcome) -> Self {
        match outcome.failure {
            None => {
                self.passed = true;
                self.trials_run = self.trials_required;
                if self.diagnostics.is_empty() {
                    self.diagnostics = format!("all {} trials passed", self.trials_required);
                }
            }
            Some((trial, msg)) => {
                self.trials_run = trial;
                self.first_failure_trial = Some(trial);
                self.diagnostics = format!("trial {trial}: {msg}");
            }
        }
        self
    }
}

/// Outcome of one trial: `None` passes, `Some(reason)` fails.
type TrialVerdict = Option<String>;

struct StressOutcome {
    /// 1-based index of the first failing trial and its reason.
    failure: Option<(u64, String)>,
}

fn trial_rng(c: &TestConfig, axiom: u8, trial: u64) -> Rng {
    seeded_rng(derive_seed(
        derive_seed(c.master_seed, u64::from(axiom)),
        trial,
    ))
}

/// Runs `trials` independent trials and reports the first failure by index.
fn stress<F>(c: &TestConfig, axiom: u8, trials: u64, trial: F) -> Result<StressOutcome>
where
    F: Fn(&mut Rng) -> Result<TrialVerdict> + Sync,
{
    let first = (0..trials)
        .into_par_iter()
        .map(|t| (t, trial(&mut trial_rng(c, axiom, t))))
        .find_first(|(_, r)| !matches!(r, Ok(None)));
    match first {
        None => Ok(StressOutcome { failure: None }),
        Some((_, Err(e))) => Err(e),
        Some((t, Ok(Some(msg)))) => Ok(StressOutcome {
            failure: Some((t + 1, msg)),
        }),
        Some((_, Ok(None))) => unreachable!("find_first only yields non-passing trials"),
    }
}

/// Existence search: returns the 1-based attempt that produced a witness.
fn search<F>(c: &TestConfig, axiom: u8, attempts: u64, attempt: F) -> Result<Option<(u64, String)>>
where
    F: Fn(&mut Rng) -> Result<Option<String>> + Sync,
{
    let first = (0..attempts)
        .into_par_iter()
        .map(|t| (t, attempt(&mut trial_rng(c, axiom, t))))
        .find_first(|(_, r)| !matches!(r, Ok(None)));
    match first {
        None => Ok(None),
        Some((_, Err(e))) => Err(e),
        Some((t, Ok(Some(w)))) => Ok(Some((t + 1, w))),
        Some((_, Ok(None))) => unreachable!("find_first only yields witnesses"),
    }
}

fn timed(mut result: TestResult, start: Instant) -> TestResult {
    result.elapsed_s = start.elapsed().as_secs_f64();
    result
}

fn admissible(rng: &mut Rng, c: &TestConfig, len: usize, cyclic: bool) -> Result<Sequence> {
    random_admissible(rng, c.input_size, len, cyclic)
}

fn check_width(f: &dyn ModelFactory, c: &TestConfig) -> Result<()> {
    if f.input_size() != c.input_size {
        return Err(HarnessError::usage(format!(
            "model uses {}-bit inputs but the harness is configured for {}",
            f.input_size(),
            c.input_size
        )));
    }
    Ok(())
}

pub fn test_01_uninformed_start(f: &dyn ModelFactory, c: &TestConfig) -> Result<TestResult> {
    let start = Instant::now();
    let si = c.simulated_infinity;
    let outcome = stress(c, 1, si, |_rng| {
        let (a, b) = (f.blank(), f.blank());
        if fingerprint(a.as_ref())? != fingerprint(b.as_ref())? {
            return Ok(Some(
                "two blank instances have different fingerprints".into(),
            ));
        }
        if a.predict() != b.predict() {
            return Ok(Some("two blank instances predict differently".into()));
        }
        Ok(None)
    })?;
    Ok(timed(TestResult::new(1, si).finish_stress(outcome), start))
}

pub fn test_02_determinism(f: &dyn ModelFactory, c: &TestConfig) -> Result<TestResult> {
    let start = Instant::now();
    let si = c.simulated_infinity;
    let max_len = DETERMINISM_LENGTH_MULTIPLE * c.pattern_period;
    let outcome = stress(c, 2, si, |rng| {
        let len = rng.gen_range(0..=max_len);
        if len == 0 {
            return Ok(None);
        }
        let s = admissible(rng, c, len, false)?;
        let (mut a, mut b) = (f.blank(), f.blank());
        for (step, x) in s.items().iter().enumerate() {
            if a.predict() != b.predict() {
                return Ok(Some(format!("predictions diverge at step {step}")));
            }
            model::update(a.as_mut(), x)?;
            model::update(b.as_mut(), x)?;
        }
        if a.predict() != b.predict() {
            return Ok(Some(format!("predictions diverge at step {len}")));
        }
        if fingerprint(a.as_ref())? != fingerprint(b.as_ref())? {
            return Ok(Some(format!(
                "fingerprints diverge after {len} identical inputs"
            )));
        }
        Ok(None)
    })?;
    Ok(timed(TestResult::new(2, si).finish_stress(outcome), start))
}

/// Feeds `simulated_infinity` random inputs to one blank and requires every
/// configuration along the way, including the blank one, to be distinct.
/// Trials are steps here.
pub fn test_03_trace(f: &dyn ModelFactory, c: &TestConfig) -> Result<TestResult> {
    let start = Instant::now();
    let si = c.simulated_infinity;
    let mut rng = trial_rng(c, 3, 0);
    let s = admissible(&mut rng, c, si as usize, false)?;
    let mut m = f.blank();
    let mut seen = HashSet::with_capacity(si as usize + 1);
    seen.insert(fingerprint(m.as_ref())?);
    let mut failure = None;
    for (i, x) in s.items().iter().enumerate() {
        model::update(m.as_mut(), x)?;
        if !seen.insert(fingerprint(m.as_ref())?) {
            failure = Some((
                i as u64 + 1,
                "configuration repeats an earlier one".to_string(),
            ));
            break;
        }
    }
    Ok(timed(
        TestResult::new(3, si).finish_stress(StressOutcome { failure }),
        start,
    ))
}

pub fn test_04_time(f: &dyn ModelFactory, c: &TestConfig) -> Result<TestResult> {
    let start = Instant::now();
    let si = c.simulated_infinity;
    let n = c.pattern_period;
    let outcome = stress(c, 4, si, |rng| {
        let p1 = admissible(rng, c, n, false)?;
        let mut p2 = admissible(rng, c, n, false)?;
        while p2 == p1 {
            p2 = admissible(rng, c, n, false)?;
        }
        let (mut a, mut b) = (f.blank(), f.blank());
        feed(a.as_mut(), &p1.concat(&p2)?)?;
        feed(b.as_mut(), &p2.concat(&p1)?)?;
        if fingerprint(a.as_ref())? == fingerprint(b.as_ref())? {
            return Ok(Some(
                "swapping two sequences leaves the configuration unchanged".into(),
            ));
        }
        Ok(None)
    })?;
    Ok(timed(TestResult::new(4, si).finish_stress(outcome), start))
}

/// Random cyclic admissible sequence with one forced refractory violation.
pub fn violating_sequence(rng: &mut Rng, c: &TestConfig) -> Result<Sequence> {
    let n = c.pattern_period;
    let mut items = admissible(rng, c, n, true)?.into_items();
    let pos = rng.gen_range(0..n);
    let channel = rng.gen_range(0..c.input_size);
    let next = (pos + 1) % n;
    items[pos] = items[pos].with_bit(channel, true);
    items[next] = items[next].with_bit(channel, true);
    let s = Sequence::new(items, true)?;
    debug_assert!(!is_admissible(&s)?);
    Ok(s)
}

pub fn test_05_refractory(f: &dyn ModelFactory, c: &TestConfig) -> Result<TestResult> {
    let start = Instant::now();
    let si = c.simulated_infinity;
    let outcome = stress(c, 5, si, |rng| {
        let s = violating_sequence(rng, c)?;
        let mut m = f.blank();
        let out = learn(m.as_mut(), &s, si)?;
        if out.learned {
            return Ok(Some(format!(
                "learned an inadmissible sequence after {} passes: {s}",
                out.passes
            )));
        }
        Ok(None)
    })?;
    Ok(timed(TestResult::new(5, si).finish_stress(outcome), start))
}

/// Part (b) runs `simulated_infinity` trials; part (a) is one accumulating
/// scenario counted as the final trial.
pub fn test_06_saturation(f: &dyn ModelFactory, c: &TestConfig) -> Result<TestResult> {
    let start = Instant::now();
    let si = c.simulated_infinity;
    let ctx_len = CONTEXT_LENGTH_MULTIPLE * c.pattern_period;
    let result = TestResult::new(6, si + 1);

    let part_b = stress(c, 6, si, |rng| {
        let mut m = f.blank();
        feed(m.as_mut(), &admissible(rng, c, ctx_len, false)?)?;
        let psi = admissible(rng, c, 2, true)?;
        let out = learn(m.as_mut(), &psi, si)?;
        if !out.learned {
            return Ok(Some(format!(
                "(b) failed to learn length-2 sequence {psi} within {si} passes"
            )));
        }
        Ok(None)
    })?;
    if part_b.failure.is_some() {
        let mut r = result.finish_stress(part_b);
        r.diagnostics.push_str("; (a) not run");
        return Ok(timed(r, start));
    }

    let mut rng = trial_rng(c, 6, u64::MAX);
    let mut acc = f.blank();
    let mut taught = 0u64;
    let mut witness = None;
    for k in 1..=si {
        let psi = admissible(&mut rng, c, c.pattern_period, true)?;
        let mut probe = f.blank();
        if !learn(probe.as_mut(), &psi, si)?.learned {
            continue;
        }
        if !learn(acc.as_mut(), &psi, si)?.learned {
            witness = Some(k);
            break;
        }
        taught += 1;
    }
    let mut r = result;
    match witness {
        Some(k) => {
            r.passed = true;
            r.trials_run = si + 1;
            r.diagnostics = format!(
                "(b) all {si} trials passed; (a) saturated at candidate {k} after {taught} sequences learned"
            );
        }
        None => {
            r.trials_run = si + 1;
            r.first_failure_trial = Some(si + 1);
            r.diagnostics = format!(
                "(b) all {si} trials passed; (a) no saturation: learned all {taught} learnable sequences among {si} candidates"
            );
        }
    }
    Ok(timed(r, start))
}

pub fn test_07_temporal_adaptability(f: &dyn ModelFactory, c: &TestConfig) -> Result<TestResult> {
    let start = Instant::now();
    let si = c.simulated_infinity;
    let n = c.pattern_period;
    if n < 3 {
        let mut r = TestResult::new(7, si);
        r.trials_run = 1;
        r.first_failure_trial = Some(1);
        r.diagnostics = "pattern_period must be >= 3 for two distinct cycle lengths".into();
        return Ok(timed(r, start));
    }
    let outcome = stress(c, 7, si, |rng| {
        let p1 = rng.gen_range(2..n);
        let p2 = rng.gen_range(p1 + 1..=n);
        let psi1 = admissible(rng, c, p1, true)?;
        let psi2 = admissible(rng, c, p2, true)?;
        let mut m = f.blank();
        if !learn(m.as_mut(), &psi1, si)?.learned {
            return Ok(Some(format!("did not learn period-{p1} sequence {psi1}")));
        }
        if !learn(m.as_mut(), &psi2, si)?.learned {
            return Ok(Some(format!(
                "learned period {p1} but not the following period-{p2} sequence {psi2}"
            )));
        }
        Ok(None)
    })?;
    Ok(timed(TestResult::new(7, si).finish_stress(outcome), start))
}

fn finish_search(mut r: TestResult, found: Option<(u64, String)>, budget: u64) -> TestResult {
    match found {
        Some((attempt, witness)) => {
            // An existence search needs exactly as many attempts as it took
            // to find a witness.
            r.passed = true;
            r.trials_required = attempt;
            r.trials_run = attempt;
            r.diagnostics = format!("witness at attempt {attempt} of {budget}: {witness}");
        }
        None => {
            r.trials_run = budget;
            r.first_failure_trial = Some(budget);
            r.diagnostics = format!("no witness within {budget} attempts");
        }
    }
    r
}

pub fn test_08_content_sensitivity(f: &dyn ModelFactory, c: &TestConfig) -> Result<TestResult> {
    let start = Instant::now();
    let si = c.simulated_infinity;
    let n = c.pattern_period;
    let found = search(c, 8, si, |rng| {
        let psi1 = admissible(rng, c, n, true)?;
        let psi2 = admissible(rng, c, n, true)?;
        let t1 = learn(f.blank().as_mut(), &psi1, si)?;
        if !t1.learned {
            return Ok(None);
        }
        let t2 = learn(f.blank().as_mut(), &psi2, si)?;
        match (t1.tau, t2.tau) {
            (Some(a), Some(b)) if a != b => Ok(Some(format!("tau {a} vs {b}"))),
            _ => Ok(None),
        }
    })?;
    Ok(timed(
        finish_search(TestResult::new(8, si), found, si),
        start,
    ))
}

pub fn test_09_context_sensitivity(f: &dyn ModelFactory, c: &TestConfig) -> Result<TestResult> {
    let start = Instant::now();
    let si = c.simulated_infinity;
    let n = c.pattern_period;
    let found = search(c, 9, si, |rng| {
        let psi = admissible(rng, c, n, true)?;
        if !learn(f.blank().as_mut(), &psi, si)?.learned {
            return Ok(None);
        }
        let mut a = f.blank();
        feed(a.as_mut(), &admissible(rng, c, n, false)?)?;
        let fa = fingerprint(a.as_ref())?;
        let mut b = None;
        for _ in 0..PREFIX_REDRAWS {
            let mut cand = f.blank();
            feed(cand.as_mut(), &admissible(rng, c, n, false)?)?;
            if fingerprint(cand.as_ref())? != fa {
                b = Some(cand);
                break;
            }
        }
        let Some(mut b) = b else {
            return Ok(None);
        };
        let ta = learn(a.as_mut(), &psi, si)?;
        let tb = learn(b.as_mut(), &psi, si)?;
        match (ta.tau, tb.tau) {
            (Some(x), Some(y)) if x != y => Ok(Some(format!("tau {x} vs {y}"))),
            _ => Ok(None),
        }
    })?;
    Ok(timed(
        finish_search(TestResult::new(9, si), found, si),
        start,
    ))
}

/// Training passes before the denoising probe.
pub fn denoise_passes(c: &TestConfig) -> u64 {
    (c.simulated_infinity / c.pattern_period as u64)
        .min(c.denoise_max_passes)
        .max(1)
}

pub fn test_10_denoising(f: &dyn ModelFactory, c: &TestConfig) -> Result<TestResult> {
    let start = Instant::now();
    let si = c.simulated_infinity;
    let passes = denoise_passes(c) as usize;
    let zeros = Input::zeros(c.input_size);
    let ones = Input::ones(c.input_size);
    let outcome = stress(c, 10, si, |rng| {
        let mut model_scores = Vec::with_capacity(c.runs_per_trial);
        let mut zero_scores = Vec::with_capacity(c.runs_per_trial);
        let mut one_scores = Vec::with_capacity(c.runs_per_trial);
        for _ in 0..c.runs_per_trial {
            let phi = admissible(rng, c, c.pattern_period, true)?;
            let mut m = f.blank();
            feed(m.as_mut(), &phi.repeat(passes))?;
            let x1 = phi.items()[0];
            let mut noisy = phi.items().to_vec();
            noisy[0] = corrupt(&x1, rng);
            model::feed_slice(m.as_mut(), &noisy)?;
            let p = m.predict();
            model_scores.push(match_score(&[p], &[x1])? as f64);
            zero_scores.push(match_score(&[zeros], &[x1])? as f64);
            one_scores.push(match_score(&[ones], &[x1])? as f64);
        }
        let (ms, zs, os) = (
            mean(&model_scores)?,
            mean(&zero_scores)?,
            mean(&one_scores)?,
        );
        if ms > zs.max(os) {
            Ok(None)
        } else {
            Ok(Some(format!(
                "mean score {ms:.3} does not beat constant baselines (zeros {zs:.3}, ones {os:.3})"
            )))
        }
    })?;
    Ok(timed(TestResult::new(10, si).finish_stress(outcome), start))
}

/// Hidden periodic generator: a cyclic admissible, not all-zero pattern with
/// period in `[2, N]`, read from a random phase. Returns the observed prefix
/// (`rho * N` items) and the withheld continuation (`N` items).
pub fn sample_generator(rng: &mut Rng, c: &TestConfig) -> Result<(Sequence, Sequence)> {
    let n = c.pattern_period;
    let period = rng.gen_range(2..=n);
    let pattern = loop {
        let p = admissible(rng, c, period, true)?;
        if p.items().iter().any(|x| !x.is_zero()) {
            break p;
        }
    };
    let phase = rng.gen_range(0..period);
    let mut stream = (0..(c.rho + 1) * n).map(|i| pattern.items()[(phase + i) % period]);
    let phi1: Vec<Input> = stream.by_ref().take(c.rho * n).collect();
    let phi2: Vec<Input> = stream.collect();
    Ok((Sequence::new(phi1, false)?, Sequence::new(phi2, false)?))
}

pub fn test_11_generalisation(f: &dyn ModelFactory, c: &TestConfig) -> Result<TestResult> {
    let start = Instant::now();
    let si = c.simulated_infinity;
    let n = c.pattern_period;
    let outcome = stress(c, 11, si, |rng| {
        let mut scores = Vec::with_capacity(c.runs_per_trial);
        for _ in 0..c.runs_per_trial {
            let (phi1, phi2) = sample_generator(rng, c)?;
            let mut m = f.blank();
            feed(m.as_mut(), &phi1)?;
            let guess = autoregress(m.as_mut(), n);
            let s = match_score(guess.items(), phi2.items())? as f64;
            scores.push(s / (c.input_size * n) as f64);
        }
        let ms = mean(&scores)?;
        if ms > 0.5 {
            Ok(None)
        } else {
            Ok(Some(format!(
                "mean normalised score {ms:.4} is not above chance"
            )))
        }
    })?;
    Ok(timed(TestResult::new(11, si).finish_stress(outcome), start))
}

/// One timing batch: uniform random inputs with a contiguous block of
/// structured probes (repeated short cycle, all-zero, or densest admissible
/// alternation) at a random offset.
pub fn timing_batch(rng: &mut Rng, c: &TestConfig, size: usize, kind: usize) -> Result<Vec<Input>> {
    let l = c.input_size;
    let structured = ((size as f64) * c.structured_input_fraction).round() as usize;
    let structured = structured.min(size);
    let mut out: Vec<Input> = (0..size - structured)
        .map(|_| random_input(rng, l))
        .collect();
    let block: Vec<Input> = match kind % 3 {
        0 => {
            let period = rng.gen_range(2..=c.pattern_period.max(2));
            let pat = admissible(rng, c, period, true)?;
            (0..structured).map(|i| pat.items()[i % period]).collect()
        }
        1 => vec![Input::zeros(l); structured],
        _ => {
            let even = 0x5555_5555_5555_5555u64 & width_mask(l);
            let odd = 0xAAAA_AAAA_AAAA_AAAAu64 & width_mask(l);
            (0..structured)
                .map(|i| Input::new(if i % 2 == 0 { even } else { odd }, l))
                .collect::<Result<_>>()?
        }
    };
    let at = rng.gen_range(0..=out.len());
    out.splice(at..at, block);
    Ok(out)
}

/// Kept out of line so both instances are timed by the same machine code.
#[inline(never)]
fn time_updates(m: &mut dyn Model, inputs: &[Input]) -> Duration {
    let start = Instant::now();
    for x in inputs {
        m.update(std::hint::black_box(x));
    }
    start.elapsed()
}

const MAX_BATCH: usize = 1 << 24;

/// Doubles the batch size until one batch on a copy of `reference` takes
/// longer than the resolution floor.
pub fn calibrate_batch(reference: &dyn Model, rng: &mut Rng, c: &TestConfig) -> Result<usize> {
    let floor = Duration::from_secs_f64(c.timing_resolution_floor_s);
    let mut batch_size = 1usize;
    loop {
        let inputs = timing_batch(rng, c, batch_size, 0)?;
        let mut probe = clone_model(reference)?;
        if time_updates(probe.as_mut(), &inputs) > floor || batch_size >= MAX_BATCH {
            return Ok(batch_size);
        }
        batch_size *= 2;
    }
}

/// Outcome of one paired timing trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TimingTrial {
    /// `None` when still indeterminate after all retries.
    pub z: Option<f64>,
    pub retries: u32,
    /// Mean seconds per update of the candidate when it broke the ceiling.
    pub ceiling_exceeded: Option<f64>,
    pub reference_ns: f64,
    pub candidate_ns: f64,
    pub updates: f64,
}

/// Times `batches_per_timing_trial` batches on fresh copies of both models,
/// alternating which runs first, and returns the one-sided Wilcoxon z of
/// `candidate - reference`. Indeterminate samples are retried with twice
/// the batches.
pub fn timing_trial(
    reference: &dyn Model,
    candidate: &dyn Model,
    rng: &mut Rng,
    c: &TestConfig,
    batch_size: usize,
) -> Result<TimingTrial> {
    let mut out = TimingTrial {
        z: None,
        retries: 0,
        ceiling_exceeded: None,
        reference_ns: 0.0,
        candidate_ns: 0.0,
        updates: 0.0,
    };
    let mut batches = c.batches_per_timing_trial;
    loop {
        let mut diffs = Vec::with_capacity(batches);
        for b in 0..batches {
            let inputs = timing_batch(rng, c, batch_size, b)?;
            // Random allocation order keeps heap placement from favouring
            // either model.
            let (mut r, mut k) = if rng.gen_bool(0.5) {
                let r = clone_model(reference)?;
                (r, clone_model(candidate)?)
            } else {
                let k = clone_model(candidate)?;
                (clone_model(reference)?, k)
            };
            let (tr, tk) = if b % 2 == 0 {
                let tr = time_updates(r.as_mut(), &inputs);
                (tr, time_updates(k.as_mut(), &inputs))
            } else {
                let tk = time_updates(k.as_mut(), &inputs);
                (time_updates(r.as_mut(), &inputs), tk)
            };
            out.reference_ns += tr.as_nanos() as f64;
            out.candidate_ns += tk.as_nanos() as f64;
            out.updates += inputs.len() as f64;
            if let Some(ceiling) = c.max_update_seconds {
                let per_update = tk.as_secs_f64() / inputs.len() as f64;
                if per_update > ceiling {
                    out.ceiling_exceeded = Some(per_update);
                    return Ok(out);
                }
            }
            diffs.push(tk.as_secs_f64() - tr.as_secs_f64());
        }
        match wilcoxon_one_sided_z(&PairedSample::new(diffs)?) {
            Ok(z) => {
                out.z = Some(z);
                return Ok(out);
            }
            Err(_) if out.retries < c.timing_max_retries => {
                out.retries += 1;
                batches *= 2;
            }
            Err(_) => return Ok(out),
        }
    }
}

/// Paired timing of the blank and the trained instance. Runs serially.
pub fn test_12_liveness(f: &dyn ModelFactory, c: &TestConfig) -> Result<TestResult> {
    let start = Instant::now();
    let si = c.simulated_infinity;
    let mut rng = trial_rng(c, 12, 0);
    let blank = f.blank();
    let mut complex = f.blank();
    feed(
        complex.as_mut(),
        &admissible(&mut rng, c, si as usize, false)?,
    )?;
    // Capability check before timing anything.
    clone_model(blank.as_ref())?;
    let batch_size = calibrate_batch(blank.as_ref(), &mut rng, c)?;

    let mut failure = None;
    let mut zs = Vec::with_capacity(si as usize);
    let mut retried = 0u64;
    let (mut blank_ns, mut complex_ns, mut updates) = (0f64, 0f64, 0f64);
    for trial in 1..=si {
        let t = timing_trial(blank.as_ref(), complex.as_ref(), &mut rng, c, batch_size)?;
        blank_ns += t.reference_ns;
        complex_ns += t.candidate_ns;
        updates += t.updates;
        if t.retries > 0 {
            retried += 1;
        }
        if let (Some(per_update), Some(ceiling)) = (t.ceiling_exceeded, c.max_update_seconds) {
            failure = Some((
                trial,
                format!("mean update time {per_update:.3e} s exceeds ceiling {ceiling:.3e} s"),
            ));
            break;
        }
        match t.z {
            Some(z) => {
                zs.push(z);
                if z >= c.z_threshold {
                    failure = Some((
                        trial,
                        format!(
                            "update time increases after training (z = {z:.3} >= {})",
                            c.z_threshold
                        ),
                    ));
                    break;
                }
            }
            None => {
                failure = Some((trial, format!("indeterminate after {} retries", t.retries)));
                break;
            }
        }
    }
    let (max_z, mean_z) = if zs.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        (
            zs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            zs.iter().sum::<f64>() / zs.len() as f64,
        )
    };
    let mut result = TestResult::new(12, si);
    result.timing = Some(TimingSummary {
        batch_size,
        max_z,
        mean_z,
        retried_trials: retried,
        blank_update_ns: blank_ns / updates.max(1.0),
        complex_update_ns: complex_ns / updates.max(1.0),
    });
    let mut r = result.finish_stress(StressOutcome { failure });
    r.diagnostics
        .push_str(&format!("; batch size {batch_size}, max z {max_z:.3}"));
    Ok(timed(r, start))
}

/// Trials a test must pass; for the existence tests 8 and 9 this is the
/// attempt budget.
pub fn required_trials(id: u8, c: &TestConfig) -> u64 {
    match id {
        6 => c.simulated_infinity + 1,
        _ => c.simulated_infinity,
    }
}

pub type AxiomTest = fn(&dyn ModelFactory, &TestConfig) -> Result<TestResult>;

pub const ALL_TESTS: [AxiomTest; 12] = [
    test_01_uninformed_start,
    test_02_determinism,
    test_03_trace,
    test_04_time,
    test_05_refractory,
    test_06_saturation,
    test_07_temporal_adaptability,
    test_08_content_sensitivity,
    test_09_context_sensitivity,
    test_10_denoising,
    test_11_generalisation,
    test_12_liveness,
];

/// Runs one axiom test by id (1–12).
pub fn run_test(id: u8, f: &dyn ModelFactory, c: &TestConfig) -> Result<TestResult> {
    c.validate()?;
    check_width(f, c)?;
    if !(1..=12).contains(&id) {
        return Err(HarnessError::usage(format!("no axiom test {id}")));
    }
    ALL_TESTS[usize::from(id) - 1](f, c)
}

/// Runs tests 1–12 in order. An incompatible model aborts with
/// [`HarnessError::Incompatible`]; axiom failures are recorded in the report.
pub fn run_all(f: &dyn ModelFactory, c: &TestConfig) -> Result<Report> {
    run_all_with_threads(f, c, None)
}

pub fn run_all_with_threads(
    f: &dyn ModelFactory,
    c: &TestConfig,
    threads: Option<usize>,
) -> Result<Report> {
    c.validate()?;
    check_width(f, c)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::usage(format!("thread pool: {e}")))?;
    let environment = Environment::measure(pool.current_num_threads());
    let mut tests = Vec::with_capacity(12);
    let mut stop = false;
    for id in 1..=12u8 {
        if stop {
            tests.push(TestResult::skipped(
                id,
                required_trials(id, c),
                "early exit after a failed test",
            ));
            continue;
        }
        let r = if id == 12 {
            if c.skip_timing {
                TestResult::skipped(12, required_trials(12, c), "timing test disabled")
            } else {
                test_12_liveness(f, c)?
            }
        } else {
            pool.install(|| ALL_TESTS[usize::from(id) - 1](f, c))?
        };
        if c.early_exit && !r.passed {
            stop = true;
        }
        tests.push(r);
    }
    Ok(Report::new(f.descriptor(), c.clone(), tests, environment))
}
