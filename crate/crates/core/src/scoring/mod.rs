//! LLM-assisted scoring: query rendering, provider calls, rating extraction
//! and the transcript archive.

mod archive;
mod parse;
mod pipeline;
mod provider;
mod template;

use thiserror::Error;

pub use archive::{ParseTag, PromptTranscript, ProviderMetadata, TranscriptArchive};
pub use parse::{parse_rating, parse_rating_with, ParseRule, ParsedRating, RangePolicy, UnparsedReason};
pub use pipeline::{score_cell, score_table, CellOptions, CellOutcome, RetryPolicy, ScoreOptions, ScoreRun};
pub use provider::{
    CellRef, DecodingParams, HttpChatProvider, LiveConfig, LlmProvider, ProviderError, ProviderRequest, ProviderResponse,
    ScriptedProvider, Usage, ENV_API_KEY, ENV_CONCURRENCY, ENV_ENDPOINT, ENV_MODEL, ENV_RETRIES,
};
pub use template::{render_prompt, PromptTemplate, CANONICAL_TEMPLATE};

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("invalid template: {0}")]
    Template(String),
    #[error("{entity} has an empty {field}")]
    MissingText { entity: String, field: &'static str },
    #[error("criterion `{criterion}` uses scale [{criterion_min}, {criterion_max}] but the template states [{template_min}, {template_max}]")]
    ScaleMismatch { criterion: String, criterion_min: f64, criterion_max: f64, template_min: f64, template_max: f64 },
    #[error("{} cell(s) without a parsable rating: {}", cells.len(), list_cells(cells))]
    Unparsed { cells: Vec<CellRef> },
    #[error("cell {cell} failed after {attempts} attempt(s): {last_error}")]
    CellFailed { cell: CellRef, attempts: u32, last_error: ProviderError, partial: Option<Box<PromptTranscript>> },
    #[error("nothing to score: {0}")]
    EmptyInput(&'static str),
    #[error("transcript archive {path}: {source}")]
    Archive { path: String, source: std::io::Error },
    #[error("transcript archive {path}, line {line}: {message}")]
    ArchiveFormat { path: String, line: usize, message: String },
    #[error("invalid table: {0}")]
    Model(#[from] crate::model::ModelError),
}

fn list_cells(cells: &[CellRef]) -> String {
    cells.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}
