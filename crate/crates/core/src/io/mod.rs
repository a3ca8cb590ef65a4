//! File formats: ACS tables, E and A tables, catalogs, rankings and run
//! manifests, plus the bundled fixtures.

mod acs;
mod catalog;
pub mod fixtures;
mod manifest;
mod ranking;
mod tables;

use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

pub use acs::{
    format_acs_csv, format_criteria_toml, format_partial_acs_csv, load_acs_csv, load_acs_csv_with, load_criteria,
    parse_acs_csv, parse_criteria_toml, save_acs_csv, save_partial_acs_csv, sidecar_path,
};
pub use catalog::{load_catalog, load_catalogs, parse_catalog, Catalog};
pub use manifest::{manifest_path, resolve_manifest_path, FileDigest, ManifestStep, RunManifest, StepSettings};
pub use ranking::{load_ranking, parse_ranking};
pub use tables::{
    format_atable, format_etable, load_atable, load_etable, parse_atable, parse_etable, save_atable, save_etable,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("{path}, line {line}, column `{column}`: {message}")]
    Cell { path: String, line: usize, column: String, message: String },
    #[error("{path}: duplicate {what} id `{id}`")]
    Duplicate { path: String, what: &'static str, id: String },
    #[error("{path}: {entity} has no {field}")]
    MissingText { path: String, entity: String, field: &'static str },
    #[error("{path}: {source}")]
    Model { path: String, source: crate::model::ModelError },
}

impl IoError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io { path: path.display().to_string(), source }
    }

    pub(crate) fn format(path: &str, message: impl Into<String>) -> Self {
        IoError::Format { path: path.to_string(), message: message.into() }
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|e| IoError::io(path, e))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_sha256(path: impl AsRef<Path>) -> Result<String, IoError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| IoError::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// Shortest decimal that round-trips, always with a fractional part
/// (`2.5`, `1.0`).
pub(crate) fn fmt_score(v: f64) -> String {
    format!("{v:?}")
}
