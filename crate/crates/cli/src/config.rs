//! JSON run configurations for the subcommands.
//!
//! Relative paths inside a config are resolved against the directory that
//! holds the config file.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;
use specsel::classify::{ClassifierKind, ClassifierParams, FeatureConfig};
use specsel::models::ModelSpec;
use specsel::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub seed: u64,
    pub model: ModelSpec,
    pub k: usize,
    /// File name prefix of the edge lists.
    #[serde(default = "default_label")]
    pub label: String,
}

fn default_label() -> String {
    "draw".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumInput {
    pub label: String,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub inputs: Vec<SpectrumInput>,
    #[serde(default = "default_spectra_name")]
    pub output: String,
}

fn default_spectra_name() -> String {
    "spectra.csv".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Candidate {
    pub name: String,
    pub model: ModelSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectConfig {
    pub seed: u64,
    pub observed: PathBuf,
    pub candidates: Vec<Candidate>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub classifier: ClassifierKind,
    #[serde(default)]
    pub features: FeatureConfig,
    #[serde(default)]
    pub params: ClassifierParams,
}

fn default_k() -> usize {
    100
}

/// Reads a JSON config, applies a `--seed` override and deserializes it.
pub fn load<T: DeserializeOwned>(path: &Path, seed: Option<u64>) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut value: Value =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if let Some(seed) = seed {
        match value.as_object_mut() {
            Some(obj) => {
                obj.insert("seed".into(), Value::from(seed));
            }
            None => return Err(Error::Config(format!("{}: expected a JSON object", path.display()))),
        }
    }
    serde_json::from_value(value).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// `p` relative to the config's directory unless it is absolute.
pub fn resolve(config: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        config.parent().unwrap_or(Path::new("")).join(p)
    }
}
