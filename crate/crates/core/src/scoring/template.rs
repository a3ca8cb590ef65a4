use serde::{Deserialize, Serialize};

use super::ScoringError;
use crate::model::{Alternative, Criterion};

pub const POLICY_NAME: &str = "{policy_name}";
pub const POLICY_DESCRIPTION: &str = "{policy_description}";
pub const CRITERION_NAME: &str = "{criterion_name}";
pub const CRITERION_DESCRIPTION: &str = "{criterion_description}";
pub const SCALE_MIN: &str = "{scale_min}";
pub const SCALE_MAX: &str = "{scale_max}";

const REQUIRED: [&str; 4] = [POLICY_NAME, POLICY_DESCRIPTION, CRITERION_NAME, CRITERION_DESCRIPTION];
const KNOWN: [&str; 6] = [POLICY_NAME, POLICY_DESCRIPTION, CRITERION_NAME, CRITERION_DESCRIPTION, SCALE_MIN, SCALE_MAX];

/// The standard policy x criterion query.
pub const CANONICAL_TEMPLATE: &str = include_str!("../../data/templates/canonical.txt");

/// Query text with `{placeholder}` markers and the rating scale it states.
///
/// The four entity placeholders must each appear at least once (the
/// canonical text names the policy and criterion twice). `{scale_min}` and
/// `{scale_max}` are optional. Any other `{word}` marker is rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptTemplate {
    body: String,
    scale_min: f64,
    scale_max: f64,
}

impl PromptTemplate {
    pub fn new(body: impl Into<String>, scale_min: f64, scale_max: f64) -> Result<Self, ScoringError> {
        let body = body.into();
        if scale_min.partial_cmp(&scale_max) != Some(std::cmp::Ordering::Less) {
            return Err(ScoringError::Template(format!("scale [{scale_min}, {scale_max}] is empty")));
        }
        for p in REQUIRED {
            if !body.contains(p) {
                return Err(ScoringError::Template(format!("placeholder {p} does not appear")));
            }
        }
        if let Some(unknown) = placeholders(&body).into_iter().find(|p| !KNOWN.contains(&p.as_str())) {
            return Err(ScoringError::Template(format!("unknown placeholder {unknown}")));
        }
        Ok(Self { body, scale_min, scale_max })
    }

    /// The canonical query on a 1 to 10 scale.
    pub fn canonical() -> Self {
        Self::new(CANONICAL_TEMPLATE.trim_end(), 1.0, 10.0).expect("canonical template is valid")
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    pub fn scale(&self) -> (f64, f64) {
        (self.scale_min, self.scale_max)
    }
}

fn placeholders(body: &str) -> Vec<String> {
    let mut out = Vec::new();
    let bytes = body.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'{' {
            if let Some(len) = body[i + 1..].find('}') {
                let inner = &body[i + 1..i + 1 + len];
                if !inner.is_empty() && inner.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    out.push(format!("{{{inner}}}"));
                }
                i += len + 2;
                continue;
            }
        }
        i += 1;
    }
    out
}

fn format_scale(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Substitutes an alternative and criterion into `template`.
///
/// Values are substituted in one left-to-right pass, so text inside a
/// description that happens to look like a placeholder is left alone.
pub fn render_prompt(template: &PromptTemplate, alt: &Alternative, crit: &Criterion) -> Result<String, ScoringError> {
    if alt.description.trim().is_empty() {
        return Err(ScoringError::MissingText { entity: format!("alternative {}", alt.id), field: "description" });
    }
    if crit.prompt_text.trim().is_empty() {
        return Err(ScoringError::MissingText { entity: format!("criterion {}", crit.id), field: "prompt_text" });
    }
    let (lo, hi) = template.scale();
    let values = [
        (POLICY_NAME, alt.name.clone()),
        (POLICY_DESCRIPTION, alt.description.clone()),
        (CRITERION_NAME, crit.name.clone()),
        (CRITERION_DESCRIPTION, crit.prompt_text.clone()),
        (SCALE_MIN, format_scale(lo)),
        (SCALE_MAX, format_scale(hi)),
    ];
    let mut out = String::with_capacity(template.body.len() + 512);
    let mut rest = template.body.as_str();
    'outer: while !rest.is_empty() {
        if rest.starts_with('{') {
            for (marker, value) in &values {
                if let Some(tail) = rest.strip_prefix(marker) {
                    out.push_str(value);
                    rest = tail;
                    continue 'outer;
                }
            }
        }
        let ch = rest.chars().next().expect("non-empty");
        out.push(ch);
        rest = &rest[ch.len_utf8()..];
    }
    Ok(out)
}
