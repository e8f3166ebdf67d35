//! Process-wide table of models the command-line driver resolves by name.
//!
//! Built-in fixtures are always available. An embedding binary registers
//! its own models before calling [`crate::cli::run`].

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use crate::error::{HarnessError, Result};
use crate::fixtures::{make_fixture, Variant};
use crate::model::ModelFactory;

/// Builds a factory for the given input width.
pub type Constructor = Arc<dyn Fn(usize) -> Result<Box<dyn ModelFactory>> + Send + Sync>;

struct Entry {
    summary: String,
    build: Constructor,
}

static REGISTRY: RwLock<BTreeMap<String, Entry>> = RwLock::new(BTreeMap::new());

/// Registers `name`. Fails if it is taken by a fixture or an earlier
/// registration.
pub fn register_model<F>(name: &str, summary: &str, build: F) -> Result<()>
where
    F: Fn(usize) -> Result<Box<dyn ModelFactory>> + Send + Sync + 'static,
{
    if name.parse::<Variant>().is_ok() {
        return Err(HarnessError::usage(format!(
            "{name:?} is a built-in fixture"
        )));
    }
    let mut table = REGISTRY.write().unwrap_or_else(|e| e.into_inner());
    if table.contains_key(name) {
        return Err(HarnessError::usage(format!(
            "model {name:?} is already registered"
        )));
    }
    table.insert(
        name.to_string(),
        Entry {
            summary: summary.to_string(),
            build: Arc::new(build),
        },
    );
    Ok(())
}

/// Fixture or registered model by name.
pub fn resolve_model(name: &str, width: usize) -> Result<Box<dyn ModelFactory>> {
    if let Ok(v) = name.parse::<Variant>() {
        return make_fixture(v, width);
    }
    let build = {
        let table = REGISTRY.read().unwrap_or_else(|e| e.into_inner());
        table.get(name).map(|e| Arc::clone(&e.build))
    };
    match build {
        Some(b) => b(width),
        None => Err(HarnessError::usage(format!(
            "unknown model {name:?} (see --list-models)"
        ))),
    }
}

/// `(name, summary)` for every fixture, then every registered model.
pub fn model_names() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Variant::ALL
        .iter()
        .map(|v| (v.name().to_string(), v.summary().to_string()))
        .collect();
    let table = REGISTRY.read().unwrap_or_else(|e| e.into_inner());
    out.extend(table.iter().map(|(k, e)| (k.clone(), e.summary.clone())));
    out
}
