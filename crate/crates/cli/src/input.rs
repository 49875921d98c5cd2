//! Command-line instances: a family spec string or a path to a complex in JSON.

use std::path::Path;

use chomp_core::{Complex, ComplexJson, FamilySpec, GameState};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone)]
pub struct Instance {
    /// The family spec text or the file path, for display.
    pub name: String,
    pub spec: Option<FamilySpec>,
    pub complex: Complex,
    /// Set when a JSON file listed faces that were not down-closed.
    pub closure_added: bool,
}

impl Instance {
    pub fn from_spec(spec: FamilySpec) -> CliResult<Self> {
        let complex = spec.build()?.complex;
        Ok(Instance { name: spec.to_string(), spec: Some(spec), complex, closure_added: false })
    }

    pub fn from_json(name: impl Into<String>, json: &ComplexJson) -> CliResult<Self> {
        let loaded = json.load()?;
        Ok(Instance { name: name.into(), spec: None, complex: loaded.complex, closure_added: loaded.closure_added })
    }

    pub fn state(&self) -> CliResult<GameState> {
        Ok(GameState::new(&self.complex)?)
    }
}

/// Files ending in `.json` (or any existing path) are read as complexes; anything else is a spec.
pub fn resolve(arg: &str) -> CliResult<Instance> {
    let path = Path::new(arg);
    if arg.ends_with(".json") || (path.is_file() && !arg.contains(':')) {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: arg.to_string(), source })?;
        let json: ComplexJson =
            serde_json::from_str(&text).map_err(|e| chomp_core::Error::InvalidComplex(format!("{arg}: {e}")))?;
        return Instance::from_json(arg, &json);
    }
    Instance::from_spec(arg.parse()?)
}
