use std::collections::HashSet;
use std::path::Path;

use serde::Deserialize;

use super::{read_text, IoError};
use crate::model::{Alternative, AlternativeId, Criterion, Direction};

/// Alternatives and criteria with the texts used to build LLM queries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Catalog {
    pub alternatives: Vec<Alternative>,
    pub criteria: Vec<Criterion>,
}

impl Catalog {
    pub fn alternative(&self, id: AlternativeId) -> Option<&Alternative> {
        self.alternatives.iter().find(|a| a.id == id)
    }

    pub fn criterion(&self, id: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.id == id)
    }
}

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlternative {
    id: u32,
    name: String,
    #[serde(default)]
    description: String,
    #[serde(default = "yes")]
    promptable: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCriterion {
    id: String,
    name: String,
    #[serde(default)]
    description: String,
    #[serde(default)]
    prompt_text: String,
    #[serde(default)]
    direction: Direction,
    scale_min: f64,
    scale_max: f64,
    #[serde(default = "yes")]
    promptable: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    #[serde(default)]
    alternative: Vec<RawAlternative>,
    #[serde(default)]
    criterion: Vec<RawCriterion>,
}

/// Parses `[[alternative]]` and `[[criterion]]` entries.
///
/// Entries are promptable unless marked `promptable = false`; a promptable
/// alternative needs a description and a promptable criterion needs a
/// prompt text.
pub fn parse_catalog(text: &str, origin: &str) -> Result<Catalog, IoError> {
    let raw: RawCatalog = toml::from_str(text).map_err(|e| IoError::format(origin, e.to_string()))?;
    let mut out = Catalog::default();
    for a in raw.alternative {
        if a.promptable && a.description.trim().is_empty() {
            return Err(IoError::MissingText { path: origin.into(), entity: format!("alternative {}", a.id), field: "description" });
        }
        out.alternatives.push(Alternative { id: AlternativeId(a.id), name: a.name, description: a.description });
    }
    for c in raw.criterion {
        if c.promptable && c.prompt_text.trim().is_empty() {
            return Err(IoError::MissingText { path: origin.into(), entity: format!("criterion {}", c.id), field: "prompt_text" });
        }
        if c.scale_min.partial_cmp(&c.scale_max) != Some(std::cmp::Ordering::Less) {
            return Err(IoError::format(origin, format!("criterion `{}`: scale_min must be below scale_max", c.id)));
        }
        out.criteria.push(Criterion {
            id: c.id,
            name: c.name,
            description: c.description,
            prompt_text: c.prompt_text,
            direction: c.direction,
            scale_min: c.scale_min,
            scale_max: c.scale_max,
        });
    }
    check_unique(&out, origin)?;
    Ok(out)
}

fn check_unique(catalog: &Catalog, origin: &str) -> Result<(), IoError> {
    let mut ids = HashSet::new();
    for a in &catalog.alternatives {
        if !ids.insert(a.id) {
            return Err(IoError::Duplicate { path: origin.into(), what: "alternative", id: a.id.to_string() });
        }
    }
    let mut ids = HashSet::new();
    for c in &catalog.criteria {
        if !ids.insert(c.id.as_str()) {
            return Err(IoError::Duplicate { path: origin.into(), what: "criterion", id: c.id.clone() });
        }
    }
    Ok(())
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<Catalog, IoError> {
    let path = path.as_ref();
    parse_catalog(&read_text(path)?, &path.display().to_string())
}

/// Merges several catalog files. An id defined twice, in one file or
/// across files, is an error.
pub fn load_catalogs<P: AsRef<Path>>(paths: &[P]) -> Result<Catalog, IoError> {
    let mut out = Catalog::default();
    for p in paths {
        let c = load_catalog(p)?;
        out.alternatives.extend(c.alternatives);
        out.criteria.extend(c.criteria);
        check_unique(&out, &p.as_ref().display().to_string())?;
    }
    Ok(out)
}
