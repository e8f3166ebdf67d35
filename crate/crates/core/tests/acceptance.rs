//! Acceptance criteria. Each test prints one `ACCEPTANCE` line with its
//! verdict and the measured values, then asserts.
//!
//! Tests take a shared lock so the wall-clock criteria do not compete with
//! the CPU-heavy ones.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;
use std::time::Instant;

use num_bigint::BigUint;
use rand::Rng as _;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use agitb::axioms::{calibrate_batch, run_all_with_threads, test_12_liveness, timing_trial};
use agitb::fixtures::{expected_failure_matrix, make_fixture, Variant};
use agitb::model::{autoregress, clone_model, learn};
use agitb::signals::{
    brute_count_admissible, count_admissible, random_admissible, seeded_rng, Input,
};
use agitb::stats::{wilcoxon_exact_p, wilcoxon_normal_p, wilcoxon_one_sided_z, PairedSample};
use agitb::{Mode, TestConfig};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {id} {name}: {verdict} ({detail})");
}

/// Enumerates every `width x length` bit grid and checks adjacency directly.
fn oracle_count(width: usize, length: usize, cyclic: bool) -> u64 {
    let total = width * length;
    let mut count = 0u64;
    for grid in 0u64..(1u64 << total) {
        let bit = |t: usize, ch: usize| grid >> (t * width + ch) & 1 == 1;
        let pairs = if cyclic {
            length
        } else {
            length.saturating_sub(1)
        };
        let ok = (0..pairs).all(|t| {
            // With one cyclic step, the step is its own successor.
            let u = (t + 1) % length;
            (0..width).all(|ch| !(bit(t, ch) && bit(u, ch)))
        });
        if ok {
            count += 1;
        }
    }
    count
}

#[test]
fn criterion_1_combinatorics() {
    let _g = serial();
    let start = Instant::now();
    let linear = count_admissible(10, 7, false).unwrap();
    let cyclic = count_admissible(10, 7, true).unwrap();
    let mut ok = linear == BigUint::from(34u32).pow(10) && cyclic == BigUint::from(29u32).pow(10);
    let mut mismatches = Vec::new();
    for width in 1..=3 {
        for length in 1..=6 {
            for cyc in [false, true] {
                let oracle = BigUint::from(oracle_count(width, length, cyc));
                let closed = count_admissible(width, length, cyc).unwrap();
                let brute = brute_count_admissible(width, length, cyc).unwrap();
                if closed != oracle || brute != oracle {
                    mismatches.push(format!("L={width} N={length} cyclic={cyc}"));
                }
            }
        }
    }
    ok &= mismatches.is_empty();
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 5.0;
    report(
        1,
        "combinatorics",
        ok,
        &format!("linear={linear} cyclic={cyclic} oracle mismatches={mismatches:?} {secs:.2}s"),
    );
    assert!(ok);
}

#[test]
fn criterion_2_sampler_uniformity() {
    let _g = serial();
    let start = Instant::now();
    const DRAWS: usize = 100_000;
    let mut rng = seeded_rng(0x5EED);
    let mut worst_p = 1.0f64;
    for cyclic in [false, true] {
        for length in 2..=5usize {
            let support: Vec<u64> = (0u64..1 << length)
                .filter(|g| {
                    let pairs = if cyclic { length } else { length - 1 };
                    (0..pairs).all(|t| !(g >> t & 1 == 1 && g >> ((t + 1) % length) & 1 == 1))
                })
                .collect();
            let mut counts: BTreeMap<u64, u64> = support.iter().map(|g| (*g, 0)).collect();
            for _ in 0..DRAWS {
                let s = random_admissible(&mut rng, 1, length, cyclic).unwrap();
                let g = s
                    .items()
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (t, x)| acc | (x.bits() << t));
                *counts
                    .get_mut(&g)
                    .expect("sample outside the admissible set") += 1;
            }
            let expected = DRAWS as f64 / support.len() as f64;
            let chi2: f64 = counts
                .values()
                .map(|&o| (o as f64 - expected).powi(2) / expected)
                .sum();
            let dof = (support.len() - 1) as f64;
            let p = ChiSquared::new(dof).unwrap().sf(chi2);
            println!(
                "  sampler L=1 N={length} cyclic={cyclic}: support {} chi2 {chi2:.2} p {p:.4}",
                support.len()
            );
            worst_p = worst_p.min(p);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = worst_p > 0.001 && secs < 10.0;
    report(
        2,
        "sampler uniformity",
        ok,
        &format!("min p={worst_p:.4} {secs:.2}s"),
    );
    assert!(ok);
}

/// `P(W+ >= w)` for ranks 1..=n by subset-sum counting.
fn oracle_exact_upper(n: usize, w: u64) -> f64 {
    let max = n * (n + 1) / 2;
    let mut ways = vec![0u64; max + 1];
    ways[0] = 1;
    for r in 1..=n {
        for s in (r..=max).rev() {
            ways[s] += ways[s - r];
        }
    }
    let hits: u64 = ways[w as usize..].iter().sum();
    hits as f64 / (1u64 << n) as f64
}

#[test]
fn criterion_3_wilcoxon() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = seeded_rng(0xC0FFEE);
    let mut worst = 0.0f64;
    let mut oracle_disagreements = 0;
    for _ in 0..200 {
        let n = rng.gen_range(5..=12usize);
        let mut magnitudes: Vec<f64> = Vec::with_capacity(n);
        while magnitudes.len() < n {
            let m = rng.gen_range(0.001..10.0f64);
            if !magnitudes.contains(&m) {
                magnitudes.push(m);
            }
        }
        let diffs: Vec<f64> = magnitudes
            .iter()
            .map(|m| if rng.gen_bool(0.5) { *m } else { -*m })
            .collect();
        let mut sorted = magnitudes.clone();
        sorted.sort_by(f64::total_cmp);
        let w: u64 = diffs
            .iter()
            .filter(|d| **d > 0.0)
            .map(|d| sorted.iter().position(|m| *m == d.abs()).unwrap() as u64 + 1)
            .sum();
        let sample = PairedSample::new(diffs).unwrap();
        let exact = wilcoxon_exact_p(&sample).unwrap();
        if (exact - oracle_exact_upper(n, w)).abs() > 1e-12 {
            oracle_disagreements += 1;
        }
        let normal = wilcoxon_normal_p(&sample).unwrap();
        worst = worst.max((normal - exact).abs());
    }
    let z5 = wilcoxon_one_sided_z(&PairedSample::new((1..=5).map(f64::from).collect()).unwrap())
        .unwrap();
    let z10 = wilcoxon_one_sided_z(&PairedSample::new((1..=10).map(f64::from).collect()).unwrap())
        .unwrap();
    let secs = start.elapsed().as_secs_f64();
    let ok = worst <= 0.03
        && oracle_disagreements == 0
        && format!("{z5:.4}") == "2.0226"
        && format!("{z10:.4}") == "2.8031"
        && secs < 5.0;
    report(
        3,
        "wilcoxon",
        ok,
        &format!(
            "max |normal - exact|={worst:.4} oracle disagreements={oracle_disagreements} z5={z5:.4} z10={z10:.4} {secs:.2}s"
        ),
    );
    assert!(ok);
}

fn failing_set(r: &agitb::Report) -> BTreeSet<u8> {
    r.tests
        .iter()
        .filter(|t| !t.passed && !t.skipped)
        .map(|t| t.axiom_id)
        .collect()
}

#[test]
fn criterion_4_fixture_matrix() {
    let _g = serial();
    let start = Instant::now();
    let expected = expected_failure_matrix();
    let mut problems = Vec::new();
    let mut observed: BTreeMap<Variant, BTreeSet<u8>> = BTreeMap::new();
    for v in Variant::ALL {
        let f = make_fixture(v, 10).unwrap();
        let want: BTreeSet<u8> = expected[&v]
            .iter()
            .copied()
            .filter(|id| *id != 12)
            .collect();
        for seed in 0..10 {
            let c = TestConfig {
                skip_timing: true,
                ..TestConfig::smoke().with_trials(100).with_seed(seed)
            };
            let got = failing_set(&run_all_with_threads(f.as_ref(), &c, None).unwrap());
            if got != want {
                problems.push(format!(
                    "{v} seed {seed}: failed {got:?}, documented {want:?}"
                ));
            }
            observed.entry(v).or_insert(got);
        }
    }
    // The wall-clock column, measured once per fixture.
    let c = TestConfig::smoke().with_trials(100);
    let mut t12_passers = Vec::new();
    for v in Variant::ALL {
        let f = make_fixture(v, 10).unwrap();
        let r = test_12_liveness(f.as_ref(), &c).unwrap();
        let documented_fail = expected[&v].contains(&12);
        if documented_fail && r.passed {
            problems.push(format!("{v} passed test 12, documented to fail"));
        }
        if r.passed {
            t12_passers.push(v);
        } else {
            observed.get_mut(&v).unwrap().insert(12);
        }
        println!("  test 12 {v}: passed={} {}", r.passed, r.diagnostics);
    }
    if t12_passers.is_empty() {
        problems.push("no fixture passed test 12".into());
    }
    for id in 1..=12u8 {
        let failing = observed.values().filter(|s| s.contains(&id)).count();
        if failing == 0 || failing == observed.len() {
            problems.push(format!(
                "test {id} lacks two-sided coverage ({failing} failing)"
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 300.0 {
        problems.push(format!("runtime {secs:.0}s"));
    }
    for (v, s) in &observed {
        println!("  {v:<20} fails {s:?}");
    }
    let ok = problems.is_empty();
    report(
        4,
        "fixture failure matrix",
        ok,
        &format!("{} problems {problems:?} {secs:.1}s", problems.len()),
    );
    assert!(ok);
}

#[test]
fn criterion_5_learning_soundness() {
    let _g = serial();
    let start = Instant::now();
    let f = make_fixture(Variant::MemoriserBounded, 10).unwrap();
    let mut rng = seeded_rng(0x1EA2);
    const BUDGET: u64 = 200;
    let (mut learned, mut unsound, mut not_minimal, mut stale) = (0, 0, 0, 0);
    for _ in 0..1000 {
        let len = rng.gen_range(2..=7usize);
        let phi = random_admissible(&mut rng, 10, len, true).unwrap();
        let mut m = f.blank();
        let out = learn(m.as_mut(), &phi, BUDGET).unwrap();
        if !out.learned {
            continue;
        }
        learned += 1;
        assert_eq!(out.tau, Some(out.passes * len as u64));
        // Configuration at the start of the winning pass.
        let mut before = f.blank();
        if out.passes > 1 {
            let replay = learn(before.as_mut(), &phi, out.passes - 1).unwrap();
            if replay.learned {
                not_minimal += 1;
            }
        }
        let mut probe = clone_model(before.as_ref()).unwrap();
        if autoregress(probe.as_mut(), len).items() != phi.items() {
            unsound += 1;
        }
        let mut probe = clone_model(m.as_ref()).unwrap();
        if autoregress(probe.as_mut(), len).items() != phi.items() {
            stale += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = learned > 0 && unsound == 0 && not_minimal == 0 && stale == 0 && secs < 120.0;
    report(
        5,
        "learning-primitive soundness",
        ok,
        &format!(
            "{learned}/1000 learned, {unsound} unsound, {not_minimal} non-minimal tau, {stale} not reproduced after learning {secs:.1}s"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_6_determinism() {
    let _g = serial();
    let start = Instant::now();
    let f = make_fixture(Variant::MemoriserBounded, 10).unwrap();
    let c = TestConfig::smoke().with_seed(42);
    let a = run_all_with_threads(f.as_ref(), &c, None)
        .unwrap()
        .masked()
        .to_json();
    let b = run_all_with_threads(f.as_ref(), &c, None)
        .unwrap()
        .masked()
        .to_json();
    let single = run_all_with_threads(f.as_ref(), &c, Some(1))
        .unwrap()
        .masked()
        .to_json();
    let other_seed = run_all_with_threads(f.as_ref(), &c.clone().with_seed(43), None)
        .unwrap()
        .masked()
        .to_json();
    let secs = start.elapsed().as_secs_f64();
    let ok = a == b && a == single && a != other_seed && secs < 600.0;
    report(
        6,
        "harness determinism",
        ok,
        &format!(
            "repeat identical={} single-thread identical={} other seed differs={} {secs:.1}s",
            a == b,
            a == single,
            a != other_seed
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_7_timing_sanity() {
    let _g = serial();
    let start = Instant::now();
    let c = TestConfig::smoke();
    let f = make_fixture(Variant::MemoriserBounded, 10).unwrap();
    let blank = f.blank();
    let mut rng = seeded_rng(7);
    let batch = calibrate_batch(blank.as_ref(), &mut rng, &c).unwrap();
    let twin = f.blank();
    let mut below = 0;
    for _ in 0..1000 {
        let t = timing_trial(blank.as_ref(), twin.as_ref(), &mut rng, &c, batch).unwrap();
        if matches!(t.z, Some(z) if z < c.z_threshold) {
            below += 1;
        }
    }
    let slow = make_fixture(Variant::Slowdown, 10).unwrap();
    let r = test_12_liveness(slow.as_ref(), &c.clone().with_trials(100)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let ok = below >= 990 && !r.passed;
    report(
        7,
        "timing sanity",
        ok,
        &format!(
            "blank-vs-blank below threshold in {below}/1000 (batch {batch}); slowdown failed={} at trial {:?} {secs:.1}s",
            !r.passed, r.first_failure_trial
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_8_protocol_constants() {
    let _g = serial();
    let c = TestConfig::default();
    let checks = [
        ("L", c.input_size == 10),
        ("N", c.pattern_period == 7),
        ("simulated infinity", c.simulated_infinity == 5000),
        ("runs per trial", c.runs_per_trial == 20),
        ("batches", c.batches_per_timing_trial == 100),
        ("floor", c.timing_resolution_floor_s == 100e-6),
        ("80/20 mix", c.structured_input_fraction == 0.2),
        ("z", c.z_threshold == 3.090),
        ("mode", c.mode == Mode::Full),
        ("smoke", TestConfig::smoke().simulated_infinity == 100),
        ("width", Input::zeros(c.input_size).width() == 10),
    ];
    let failed: Vec<&str> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| *n)
        .collect();
    let ok = failed.is_empty();
    report(
        8,
        "protocol constants",
        ok,
        &format!("mismatched: {failed:?}"),
    );
    assert!(ok);
}
