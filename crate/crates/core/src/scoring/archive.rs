use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::parse::{ParseRule, ParsedRating, UnparsedReason};
use super::provider::{CellRef, DecodingParams, Usage};
use super::ScoringError;
use crate::model::AlternativeId;

/// Which grammar rule produced the rating, or why none did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseTag {
    R1Fraction,
    R1Label,
    R2Range,
    R3Rated,
    NoMatch,
    OutOfScale,
}

impl From<&ParsedRating> for ParseTag {
    fn from(p: &ParsedRating) -> Self {
        match p {
            ParsedRating::Rated { rule, .. } => match rule {
                ParseRule::R1Fraction => ParseTag::R1Fraction,
                ParseRule::R1Label => ParseTag::R1Label,
                ParseRule::R2Range => ParseTag::R2Range,
                ParseRule::R3Rated => ParseTag::R3Rated,
            },
            ParsedRating::Unparsed(UnparsedReason::NoMatch) => ParseTag::NoMatch,
            ParsedRating::Unparsed(UnparsedReason::OutOfScale { .. }) => ParseTag::OutOfScale,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderMetadata {
    pub model: String,
    /// RFC 3339, UTC.
    pub timestamp: String,
    pub params: DecodingParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usage: Option<Usage>,
}

/// One provider response and what the parser made of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptTranscript {
    pub alternative_id: AlternativeId,
    pub criterion_id: String,
    pub rendered_prompt: String,
    pub raw_response: String,
    /// `null` when no in-scale rating was found.
    pub parsed_rating: Option<f64>,
    pub parse_rule: ParseTag,
    /// 1-based position in the cell's attempt chain.
    pub attempt: u32,
    pub provider: ProviderMetadata,
}

impl PromptTranscript {
    pub fn cell(&self) -> CellRef {
        CellRef { alternative_id: self.alternative_id, criterion_id: self.criterion_id.clone() }
    }

    pub fn is_rated(&self) -> bool {
        self.parsed_rating.is_some()
    }
}

/// Append-only transcript log, one JSON object per line.
///
/// Rated transcripts double as a cache keyed by `(model, rendered_prompt)`.
#[derive(Debug, Default)]
pub struct TranscriptArchive {
    path: Option<PathBuf>,
    entries: Vec<PromptTranscript>,
    rated: HashMap<(String, String), usize>,
}

impl TranscriptArchive {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens `path`, loading any records already present. The file is
    /// created on first append.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, ScoringError> {
        let path = path.as_ref().to_path_buf();
        let mut archive = Self { path: Some(path.clone()), ..Self::default() };
        let shown = path.display().to_string();
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(archive),
            Err(source) => return Err(ScoringError::Archive { path: shown, source }),
        };
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| ScoringError::Archive { path: shown.clone(), source })?;
            if line.trim().is_empty() {
                continue;
            }
            let t: PromptTranscript = serde_json::from_str(&line).map_err(|e| ScoringError::ArchiveFormat {
                path: shown.clone(),
                line: i + 1,
                message: e.to_string(),
            })?;
            archive.index(t);
        }
        Ok(archive)
    }

    fn index(&mut self, t: PromptTranscript) {
        if t.is_rated() {
            self.rated.insert((t.provider.model.clone(), t.rendered_prompt.clone()), self.entries.len());
        }
        self.entries.push(t);
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Writes `t` to the backing file (if any) and then records it.
    pub fn append(&mut self, t: PromptTranscript) -> Result<(), ScoringError> {
        if let Some(path) = &self.path {
            let shown = || path.display().to_string();
            let mut line = serde_json::to_string(&t).expect("transcripts always serialize");
            line.push('\n');
            let mut file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|source| ScoringError::Archive { path: shown(), source })?;
            file.write_all(line.as_bytes()).map_err(|source| ScoringError::Archive { path: shown(), source })?;
        }
        self.index(t);
        Ok(())
    }

    /// Latest rated transcript for an identical request.
    pub fn lookup(&self, model: &str, prompt: &str) -> Option<&PromptTranscript> {
        self.rated.get(&(model.to_string(), prompt.to_string())).map(|&i| &self.entries[i])
    }

    pub fn entries(&self) -> &[PromptTranscript] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
