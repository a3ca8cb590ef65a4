use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{file_sha256, read_text, write_text, IoError};
use crate::rules::RuleParams;
use crate::scoring::DecodingParams;

/// A file consumed or produced by a step. `sha256` is absent for outputs
/// that are not byte-reproducible (transcript archives carry timestamps).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sha256: Option<String>,
}

/// Resolved parameters of a step, recorded for readers. Replay uses `args`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StepSettings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rules: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criteria: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule_params: Option<RuleParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provider_model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoding: Option<DecodingParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestStep {
    pub command: String,
    /// Command-line arguments after the command name. Paths are relative to
    /// the manifest's directory when they lie below it.
    pub args: Vec<String>,
    #[serde(default)]
    pub settings: StepSettings,
    #[serde(default)]
    pub inputs: Vec<FileDigest>,
    #[serde(default)]
    pub outputs: Vec<FileDigest>,
}

/// Everything needed to rerun a sequence of commands and check that the
/// outputs come out byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    #[serde(default, rename = "step")]
    pub steps: Vec<ManifestStep>,
}

impl Default for RunManifest {
    fn default() -> Self {
        Self { tool_version: env!("CARGO_PKG_VERSION").to_string(), steps: Vec::new() }
    }
}

impl RunManifest {
    pub fn parse(text: &str, origin: &str) -> Result<Self, IoError> {
        toml::from_str(text).map_err(|e| IoError::format(origin, e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifests always serialize")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IoError> {
        let path = path.as_ref();
        Self::parse(&read_text(path)?, &path.display().to_string())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), IoError> {
        write_text(path.as_ref(), &self.to_toml())
    }

    /// Adds `step`, replacing an earlier step that wrote the same outputs.
    pub fn record(&mut self, step: ManifestStep) {
        let key: Vec<&str> = step.outputs.iter().map(|o| o.path.as_str()).collect();
        if let Some(existing) = self
            .steps
            .iter_mut()
            .find(|s| s.command == step.command && s.outputs.iter().map(|o| o.path.as_str()).eq(key.iter().copied()))
        {
            *existing = step;
        } else {
            self.steps.push(step);
        }
    }

    /// Loads the manifest at `path` (or starts a new one), records `step`
    /// and writes it back.
    pub fn append_to(path: impl AsRef<Path>, step: ManifestStep) -> Result<Self, IoError> {
        let path = path.as_ref();
        let mut manifest = if path.exists() { Self::load(path)? } else { Self::default() };
        manifest.tool_version = env!("CARGO_PKG_VERSION").to_string();
        manifest.record(step);
        manifest.save(path)?;
        Ok(manifest)
    }
}

fn absolute(path: &Path) -> PathBuf {
    let joined = if path.is_absolute() {
        path.to_path_buf()
    } else {
        std::env::current_dir().map(|d| d.join(path)).unwrap_or_else(|_| path.to_path_buf())
    };
    let mut out = PathBuf::new();
    for c in joined.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir => {
                out.pop();
            }
            other => out.push(other),
        }
    }
    out
}

/// How `path` is written into a manifest stored in `base`.
pub fn manifest_path(base: &Path, path: &Path) -> String {
    let (base, path) = (absolute(base), absolute(path));
    match path.strip_prefix(&base) {
        Ok(rel) if !rel.as_os_str().is_empty() => rel.display().to_string(),
        _ => path.display().to_string(),
    }
}

/// Inverse of [`manifest_path`].
pub fn resolve_manifest_path(base: &Path, recorded: &str) -> PathBuf {
    let p = Path::new(recorded);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl FileDigest {
    /// Digest of the file at `path`, recorded relative to `base`.
    pub fn of(base: &Path, path: &Path) -> Result<Self, IoError> {
        Ok(Self { path: manifest_path(base, path), sha256: Some(file_sha256(path)?) })
    }

    pub fn unpinned(base: &Path, path: &Path) -> Self {
        Self { path: manifest_path(base, path), sha256: None }
    }
}
