//! Binary inputs, refractory-constrained sequences and their combinatorics.
//!
//! An [`Input`] is one time step of `width` parallel spike channels. A
//! [`Sequence`] is admissible when no channel fires in two consecutive steps
//! (including the wrap-around pair for cyclic sequences). Channels are
//! independent under that constraint, which is what makes exact counting and
//! exact uniform sampling cheap: a single channel is a binary string with no
//! two adjacent ones, counted by Fibonacci numbers (linear) or Lucas numbers
//! (cyclic).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Widest input supported; bits are packed into one `u64`.
pub const MAX_WIDTH: usize = 64;

/// Largest `width * length` that [`brute_count_admissible`] will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Deterministic generator used everywhere in the harness.
pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a parent seed with a stream tag (splitmix64 finaliser).
pub fn derive_seed(parent: u64, tag: u64) -> u64 {
    let mut z = parent ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One time step: `width` binary channels packed little-endian (channel 0 is
/// bit 0 and is printed first).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Input {
    bits: u64,
    width: u8,
}

impl Input {
    pub fn new(bits: u64, width: usize) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(HarnessError::usage(format!(
                "input width must be in 1..={MAX_WIDTH}, got {width}"
            )));
        }
        if bits & !width_mask(width) != 0 {
            return Err(HarnessError::usage(format!(
                "bit pattern {bits:#x} does not fit in {width} channels"
            )));
        }
        Ok(Input {
            bits,
            width: width as u8,
        })
    }

    pub fn zeros(width: usize) -> Self {
        Input::new(0, width).expect("width checked by caller")
    }

    pub fn ones(width: usize) -> Self {
        Input::new(width_mask(width), width).expect("width checked by caller")
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let packed = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i));
        Input::new(packed, bits.len())
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn width(&self) -> usize {
        usize::from(self.width)
    }

    pub fn get(&self, channel: usize) -> bool {
        channel < self.width() && (self.bits >> channel) & 1 == 1
    }

    pub fn with_bit(mut self, channel: usize, value: bool) -> Self {
        assert!(channel < self.width(), "channel {channel} out of range");
        if value {
            self.bits |= 1 << channel;
        } else {
            self.bits &= !(1 << channel);
        }
        self
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    fn check_width(&self, other: &Input) -> Result<()> {
        if self.width != other.width {
            return Err(HarnessError::usage(format!(
                "input width mismatch: {} vs {}",
                self.width, other.width
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for Input {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Input({self})")
    }
}

impl fmt::Display for Input {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Input {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(HarnessError::usage(format!(
                    "invalid bit character {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Input::from_bools(&bits)
    }
}

pub(crate) fn width_mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Ordered list of inputs, optionally read cyclically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sequence {
    items: Vec<Input>,
    cyclic: bool,
}

impl Sequence {
    pub fn new(items: Vec<Input>, cyclic: bool) -> Result<Self> {
        if let Some(first) = items.first() {
            if let Some(bad) = items.iter().find(|x| x.width != first.width) {
                return Err(HarnessError::usage(format!(
                    "sequence mixes widths {} and {}",
                    first.width, bad.width
                )));
            }
        }
        Ok(Sequence { items, cyclic })
    }

    pub fn empty(cyclic: bool) -> Self {
        Sequence {
            items: Vec::new(),
            cyclic,
        }
    }

    /// Parses whitespace- or comma-separated bit strings, e.g. `"1010 0101"`.
    pub fn parse(text: &str, cyclic: bool) -> Result<Self> {
        let items = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Input>>>()?;
        Sequence::new(items, cyclic)
    }

    pub fn items(&self) -> &[Input] {
        &self.items
    }

    pub fn into_items(self) -> Vec<Input> {
        self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn width(&self) -> Option<usize> {
        self.items.first().map(Input::width)
    }

    pub fn with_cyclic(mut self, cyclic: bool) -> Self {
        self.cyclic = cyclic;
        self
    }

    /// `self` followed by `other`; keeps `self`'s cyclic flag.
    pub fn concat(&self, other: &Sequence) -> Result<Sequence> {
        let mut items = self.items.clone();
        items.extend_from_slice(&other.items);
        Sequence::new(items, self.cyclic)
    }

    /// `count` back-to-back copies.
    pub fn repeat(&self, count: usize) -> Sequence {
        Sequence {
            items: self.items.repeat(count),
            cyclic: self.cyclic,
        }
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        if self.cyclic {
            f.write_str(" ~")?;
        }
        Ok(())
    }
}

/// Number of channels firing in both inputs.
pub fn overlap(a: &Input, b: &Input) -> Result<u32> {
    a.check_width(b)?;
    Ok((a.bits & b.bits).count_ones())
}

/// Whether `s` obeys the refractory constraint. A cyclic sequence also checks
/// the wrap pair, so a length-1 cyclic sequence is admissible only when its
/// single input is all-zero.
pub fn is_admissible(s: &Sequence) -> Result<bool> {
    if s.is_empty() {
        return Err(HarnessError::usage("admissibility of an empty sequence"));
    }
    for pair in s.items.windows(2) {
        if overlap(&pair[0], &pair[1])? != 0 {
            return Ok(false);
        }
    }
    if s.cyclic {
        let first = &s.items[0];
        let last = &s.items[s.len() - 1];
        if overlap(last, first)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact Fibonacci numbers with `F_0 = 0`, valid up to `F_186`.
fn fib_u128(index: u32) -> u128 {
    let (mut a, mut b) = (0u128, 1u128);
    for _ in 0..index {
        let next = a + b;
        a = b;
        b = next;
    }
    a
}

const EXACT_FIB_LIMIT: u32 = 180;

/// Returns `true` with probability `F_a / (F_a + F_b)`.
fn fib_bernoulli(rng: &mut Rng, a: u32, b: u32) -> bool {
    if a.max(b) <= EXACT_FIB_LIMIT {
        let (wa, wb) = (fib_u128(a), fib_u128(b));
        return rng.gen_range(0..wa + wb) < wa;
    }
    // F_i / F_j converges to phi^(i-j) to full double precision at these indices.
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let p = 1.0 / (1.0 + phi.powi(b as i32 - a as i32));
    rng.gen::<f64>() < p
}

/// Uniform binary string of `len` with no adjacent ones, given that the bit
/// before it was zero.
fn sample_linear_channel(rng: &mut Rng, out: &mut [bool]) {
    let mut prev = false;
    let len = out.len();
    for (i, slot) in out.iter_mut().enumerate() {
        let remaining = (len - i) as u32;
        // A one here leaves F_r completions, a zero leaves F_{r+1}.
        let bit = !prev && fib_bernoulli(rng, remaining, remaining + 1);
        *slot = bit;
        prev = bit;
    }
}

fn sample_cyclic_channel(rng: &mut Rng, out: &mut [bool]) {
    let n = out.len() as u32;
    // Strings starting with one: F_{n-1}; starting with zero: F_{n+1}. Sum L_n.
    let first = n >= 2 && fib_bernoulli(rng, n - 1, n + 1);
    out[0] = first;
    if first {
        let last = out.len() - 1;
        out[1] = false;
        out[last] = false;
        if out.len() > 3 {
            sample_linear_channel(rng, &mut out[2..last]);
        }
    } else {
        sample_linear_channel(rng, &mut out[1..]);
    }
}

/// Draws a sequence uniformly from the admissible sequences of the given
/// length and width (linear or cyclic). Each channel is drawn independently
/// by sequential conditioning on the number of admissible completions.
pub fn random_admissible(
    rng: &mut Rng,
    width: usize,
    length: usize,
    cyclic: bool,
) -> Result<Sequence> {
    if length == 0 {
        return Err(HarnessError::usage("random_admissible needs length >= 1"));
    }
    if width == 0 || width > MAX_WIDTH {
        return Err(HarnessError::usage(format!(
            "input width must be in 1..={MAX_WIDTH}, got {width}"
        )));
    }
    let mut words = vec![0u64; length];
    let mut channel = vec![false; length];
    for c in 0..width {
        if cyclic {
            sample_cyclic_channel(rng, &mut channel);
        } else {
            sample_linear_channel(rng, &mut channel);
        }
        for (w, &bit) in words.iter_mut().zip(&channel) {
            *w |= u64::from(bit) << c;
        }
    }
    let items = words
        .into_iter()
        .map(|w| Input {
            bits: w,
            width: width as u8,
        })
        .collect();
    Ok(Sequence { items, cyclic })
}

/// Uniform over all `2^width` patterns.
pub fn random_input(rng: &mut Rng, width: usize) -> Input {
    let bits = rng.gen::<u64>() & width_mask(width);
    Input {
        bits,
        width: width as u8,
    }
}

fn fib_big(index: usize) -> BigUint {
    let (mut a, mut b) = (BigUint::from(0u32), BigUint::from(1u32));
    for _ in 0..index {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

fn lucas_big(index: usize) -> BigUint {
    let (mut a, mut b) = (BigUint::from(2u32), BigUint::from(1u32));
    for _ in 0..index {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// Size of the admissible set: `F_{N+2}^L` for linear sequences and
/// `Lucas_N^L` for cyclic ones.
pub fn count_admissible(width: usize, length: usize, cyclic: bool) -> Result<BigUint> {
    if width == 0 || length == 0 {
        return Err(HarnessError::usage(
            "count_admissible needs width >= 1 and length >= 1",
        ));
    }
    let per_channel = if cyclic {
        lucas_big(length)
    } else {
        fib_big(length + 2)
    };
    Ok(per_channel.pow(width as u32))
}

/// Exhaustive enumeration oracle for [`count_admissible`].
pub fn brute_count_admissible(width: usize, length: usize, cyclic: bool) -> Result<BigUint> {
    if width == 0 || length == 0 {
        return Err(HarnessError::usage(
            "brute_count_admissible needs width >= 1 and length >= 1",
        ));
    }
    if width * length > BRUTE_FORCE_LIMIT {
        return Err(HarnessError::usage(format!(
            "refusing to enumerate 2^{} sequences (limit 2^{BRUTE_FORCE_LIMIT})",
            width * length
        )));
    }
    let mask = width_mask(width);
    let mut count = 0u64;
    for code in 0u64..(1u64 << (width * length)) {
        let items = (0..length)
            .map(|j| Input::new((code >> (j * width)) & mask, width))
            .collect::<Result<Vec<_>>>()?;
        if is_admissible(&Sequence::new(items, cyclic)?)? {
            count += 1;
        }
    }
    Ok(BigUint::from(count))
}

/// Number of agreeing bit positions between two equal-shape sequences.
pub fn match_score(alpha: &[Input], beta: &[Input]) -> Result<u64> {
    if alpha.len() != beta.len() {
        return Err(HarnessError::usage(format!(
            "match_score length mismatch: {} vs {}",
            alpha.len(),
            beta.len()
        )));
    }
    let mut score = 0u64;
    for (a, b) in alpha.iter().zip(beta) {
        a.check_width(b)?;
        score += u64::from(a.width) - u64::from((a.bits ^ b.bits).count_ones());
    }
    Ok(score)
}

/// Uniformly resampled pattern that differs from `x`. Not
/// admissibility-preserving.
pub fn corrupt(x: &Input, rng: &mut Rng) -> Input {
    loop {
        let candidate = random_input(rng, x.width());
        if candidate != *x {
            return candidate;
        }
    }
}
