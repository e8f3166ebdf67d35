//! The black-box contract for models under evaluation, and the learning-loop
//! primitives built on top of it.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};
use crate::signals::{Input, Sequence};

/// Equality-comparable summary of a model configuration. Two instances with
/// equal fingerprints are taken to realise the same configuration.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint(pub [u8; 32]);

impl Fingerprint {
    /// SHA-256 of a serialized state.
    pub fn digest(bytes: &[u8]) -> Self {
        Fingerprint(Sha256::digest(bytes).into())
    }
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint(")?;
        for b in &self.0[..8] {
            write!(f, "{b:02x}")?;
        }
        write!(f, "..)")
    }
}

/// A model under evaluation.
///
/// The harness drives each instance from one thread at a time, but may move
/// instances between threads, hence `Send`.
pub trait Model: Send {
    /// Width of the inputs this model consumes and predicts.
    fn input_size(&self) -> usize;

    /// Current one-step-ahead prediction. Must not change the model.
    fn predict(&self) -> Input;

    /// One atomic transition on the realised input. Must accept any input of
    /// the model's width.
    fn update(&mut self, input: &Input);

    /// `None` when the model type offers no fingerprint mechanism.
    fn fingerprint(&self) -> Option<Fingerprint>;

    /// Independent copy with identical configuration; `None` when unsupported.
    fn clone_model(&self) -> Option<Box<dyn Model>>;
}

/// Produces blank (uninformed) instances of one model type.
pub trait ModelFactory: Send + Sync {
    fn blank(&self) -> Box<dyn Model>;

    fn descriptor(&self) -> String;

    fn input_size(&self) -> usize;
}

/// Learning outcome for one sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnOutcome {
    pub learned: bool,
    /// Learning time in atomic steps; `None` encodes "not learned".
    pub tau: Option<u64>,
    /// Full passes over the sequence consumed.
    pub passes: u64,
}

pub fn predict(model: &dyn Model) -> Input {
    model.predict()
}

pub fn update(model: &mut dyn Model, input: &Input) -> Result<()> {
    if input.width() != model.input_size() {
        return Err(HarnessError::usage(format!(
            "model expects {}-bit inputs, got {}",
            model.input_size(),
            input.width()
        )));
    }
    model.update(input);
    Ok(())
}

pub fn fingerprint(model: &dyn Model) -> Result<Fingerprint> {
    model
        .fingerprint()
        .ok_or_else(|| HarnessError::incompatible("model type provides no fingerprint"))
}

pub fn clone_model(model: &dyn Model) -> Result<Box<dyn Model>> {
    model
        .clone_model()
        .ok_or_else(|| HarnessError::incompatible("model type does not support cloning"))
}

/// Updates the model with every input of `s` in order.
pub fn feed(model: &mut dyn Model, s: &Sequence) -> Result<()> {
    feed_slice(model, s.items())
}

pub(crate) fn feed_slice(model: &mut dyn Model, items: &[Input]) -> Result<()> {
    for x in items {
        update(model, x)?;
    }
    Ok(())
}

/// Rolls the model forward `n` steps on its own predictions and returns
/// them.
pub fn autoregress(model: &mut dyn Model, n: usize) -> Sequence {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let p = model.predict();
        out.push(p);
        model.update(&p);
    }
    Sequence::new(out, false).expect("predictions share the model's width")
}

/// Teacher-forced learning loop.
///
/// Feeds `phi` repeatedly. After pass `n` the sequence counts as learned when
/// every prediction made during that pass matched the input that followed;
/// since the inputs fed equal the predictions, the configuration at the
/// start of that pass reproduces `phi` autoregressively. The first such pass
/// wins, so the reported `tau = |phi| * n` is minimal.
pub fn learn(model: &mut dyn Model, phi: &Sequence, max_passes: u64) -> Result<LearnOutcome> {
    if max_passes == 0 {
        return Err(HarnessError::usage("learn needs max_passes >= 1"));
    }
    if phi.is_empty() {
        return Err(HarnessError::usage("cannot learn an empty sequence"));
    }
    for pass in 1..=max_passes {
        let mut all_correct = true;
        for x in phi.items() {
            if model.predict() != *x {
                all_correct = false;
            }
            update(model, x)?;
        }
        if all_correct {
            return Ok(LearnOutcome {
                learned: true,
                tau: Some(phi.len() as u64 * pass),
                passes: pass,
            });
        }
    }
    Ok(LearnOutcome {
        learned: false,
        tau: None,
        passes: max_passes,
    })
}

/// Whether the current configuration reproduces `phi` autoregressively,
/// probed on a clone so `model` is untouched.
pub fn reproduces(model: &dyn Model, phi: &Sequence) -> Result<bool> {
    let mut probe = clone_model(model)?;
    Ok(autoregress(probe.as_mut(), phi.len()).items() == phi.items())
}
