use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::archive::{ParseTag, PromptTranscript, ProviderMetadata, TranscriptArchive};
use super::parse::{parse_rating_with, RangePolicy};
use super::provider::{CellRef, DecodingParams, LlmProvider, ProviderError, ProviderRequest};
use super::template::{render_prompt, PromptTemplate};
use super::ScoringError;
use crate::model::{AcsTable, Alternative, Criterion, Provenance};

/// Bounded exponential backoff. Attempt `k` (1-based) that fails with a
/// retryable error waits `min(base * 2^(k-1), max)`, or the provider's
/// `Retry-After` hint capped at `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    #[serde(with = "millis")]
    pub base_backoff: Duration,
    #[serde(with = "millis")]
    pub max_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self { max_attempts: 3, base_backoff: Duration::from_millis(250), max_backoff: Duration::from_secs(8) }
    }
}

impl RetryPolicy {
    /// No sleeping between attempts. Meant for scripted providers.
    pub fn immediate(max_attempts: u32) -> Self {
        Self { max_attempts, base_backoff: Duration::ZERO, max_backoff: Duration::ZERO }
    }

    pub fn backoff(&self, attempt: u32, hint: Option<Duration>) -> Duration {
        let exp = self.base_backoff.saturating_mul(1u32 << attempt.saturating_sub(1).min(20));
        hint.unwrap_or(exp).min(self.max_backoff)
    }
}

mod millis {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        u64::deserialize(d).map(Duration::from_millis)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CellOptions {
    pub retry: RetryPolicy,
    pub decoding: DecodingParams,
    pub range_policy: RangePolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    /// Every response received, in order. Empty for cache hits.
    pub transcripts: Vec<PromptTranscript>,
    /// The transcript that decides the cell.
    pub transcript: PromptTranscript,
    pub cached: bool,
}

impl CellOutcome {
    pub fn rating(&self) -> Option<f64> {
        self.transcript.parsed_rating
    }
}

fn check_scale(template: &PromptTemplate, crit: &Criterion) -> Result<(), ScoringError> {
    let (lo, hi) = template.scale();
    if lo != crit.scale_min || hi != crit.scale_max {
        return Err(ScoringError::ScaleMismatch {
            criterion: crit.id.clone(),
            criterion_min: crit.scale_min,
            criterion_max: crit.scale_max,
            template_min: lo,
            template_max: hi,
        });
    }
    Ok(())
}

fn cell_of(alt: &Alternative, crit: &Criterion) -> CellRef {
    CellRef { alternative_id: alt.id, criterion_id: crit.id.clone() }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn run_chain(
    provider: &dyn LlmProvider,
    template: &PromptTemplate,
    cell: CellRef,
    prompt: String,
    options: &CellOptions,
) -> Result<CellOutcome, ScoringError> {
    let (lo, hi) = template.scale();
    let request = ProviderRequest {
        model: provider.model().to_string(),
        prompt,
        params: options.decoding.clone(),
        cell: Some(cell.clone()),
    };
    let max_attempts = options.retry.max_attempts.max(1);
    let mut transcripts: Vec<PromptTranscript> = Vec::new();
    let mut last_error = None;
    for attempt in 1..=max_attempts {
        match provider.complete(&request) {
            Ok(response) => {
                last_error = None;
                let parsed = parse_rating_with(&response.text, lo, hi, options.range_policy);
                let t = PromptTranscript {
                    alternative_id: cell.alternative_id,
                    criterion_id: cell.criterion_id.clone(),
                    rendered_prompt: request.prompt.clone(),
                    raw_response: response.text,
                    parsed_rating: parsed.value(),
                    parse_rule: ParseTag::from(&parsed),
                    attempt,
                    provider: ProviderMetadata {
                        model: request.model.clone(),
                        timestamp: now(),
                        params: request.params.clone(),
                        usage: response.usage,
                    },
                };
                let rated = t.is_rated();
                transcripts.push(t);
                if rated {
                    break;
                }
            }
            Err(err) => {
                if !err.is_retryable() {
                    return Err(ScoringError::CellFailed {
                        cell,
                        attempts: attempt,
                        last_error: err,
                        partial: transcripts.pop().map(Box::new),
                    });
                }
                let hint = match &err {
                    ProviderError::RateLimited { retry_after } => *retry_after,
                    _ => None,
                };
                last_error = Some(err);
                if attempt < max_attempts {
                    std::thread::sleep(options.retry.backoff(attempt, hint));
                }
            }
        }
    }
    if let Some(err) = last_error {
        return Err(ScoringError::CellFailed {
            cell,
            attempts: max_attempts,
            last_error: err,
            partial: transcripts.pop().map(Box::new),
        });
    }
    let transcript = transcripts.last().cloned().expect("a chain without errors has a response");
    Ok(CellOutcome { transcripts, transcript, cached: false })
}

/// Scores one cell, retrying unparsable replies and transient failures.
///
/// A rated transcript in `cache` for the same model and prompt is returned
/// without calling the provider. Transcripts are not archived here; that is
/// the caller's choice.
pub fn score_cell(
    provider: &dyn LlmProvider,
    template: &PromptTemplate,
    alt: &Alternative,
    crit: &Criterion,
    options: &CellOptions,
    cache: Option<&TranscriptArchive>,
) -> Result<CellOutcome, ScoringError> {
    check_scale(template, crit)?;
    let prompt = render_prompt(template, alt, crit)?;
    if let Some(hit) = cache.and_then(|c| c.lookup(provider.model(), &prompt)) {
        return Ok(CellOutcome { transcripts: Vec::new(), transcript: hit.clone(), cached: true });
    }
    run_chain(provider, template, cell_of(alt, crit), prompt, options)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreOptions {
    pub concurrency: usize,
    #[serde(flatten)]
    pub cell: CellOptions,
    /// Turn unparsed cells into a worklist instead of failing the run.
    pub allow_partial: bool,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        Self { concurrency: 4, cell: CellOptions::default(), allow_partial: false }
    }
}

/// Result of a [`score_table`] run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRun {
    pub alternatives: Vec<Alternative>,
    pub criteria: Vec<Criterion>,
    /// Row-major ratings; `None` marks a worklist cell.
    pub scores: Vec<Vec<Option<f64>>>,
    /// Deciding transcript per cell, row-major.
    pub transcripts: Vec<PromptTranscript>,
    /// Cells that still need a human-entered score.
    pub worklist: Vec<CellRef>,
    pub cache_hits: usize,
}

impl ScoreRun {
    pub fn is_complete(&self) -> bool {
        self.worklist.is_empty()
    }

    /// The scored table with llm provenance, once every cell has a rating.
    pub fn table(&self) -> Option<Result<AcsTable, ScoringError>> {
        if !self.is_complete() {
            return None;
        }
        let scores = self.scores.iter().map(|r| r.iter().map(|v| v.expect("complete run")).collect()).collect();
        Some(
            AcsTable::new(self.alternatives.clone(), self.criteria.clone(), scores, Provenance::Llm)
                .map_err(ScoringError::from),
        )
    }

    pub fn transcript(&self, i: usize, j: usize) -> &PromptTranscript {
        &self.transcripts[i * self.criteria.len() + j]
    }
}

/// Scores every alternative x criterion pair.
///
/// Provider calls run on up to `options.concurrency` threads; archive
/// appends happen on the calling thread in completion order. A hard cell
/// failure stops the dispatch of new cells, drains in-flight ones into the
/// archive and returns the error; rerunning against the same archive
/// resumes from the rated cells.
pub fn score_table(
    provider: &dyn LlmProvider,
    template: &PromptTemplate,
    alternatives: &[Alternative],
    criteria: &[Criterion],
    options: &ScoreOptions,
    archive: &mut TranscriptArchive,
) -> Result<ScoreRun, ScoringError> {
    if alternatives.is_empty() {
        return Err(ScoringError::EmptyInput("no alternatives"));
    }
    if criteria.is_empty() {
        return Err(ScoringError::EmptyInput("no criteria"));
    }
    for c in criteria {
        check_scale(template, c)?;
    }
    let n = criteria.len();
    let mut prompts = Vec::with_capacity(alternatives.len() * n);
    for a in alternatives {
        for c in criteria {
            prompts.push(render_prompt(template, a, c)?);
        }
    }

    let mut decided: Vec<Option<PromptTranscript>> = vec![None; prompts.len()];
    let mut pending = Vec::new();
    for (k, prompt) in prompts.iter().enumerate() {
        match archive.lookup(provider.model(), prompt) {
            Some(hit) => decided[k] = Some(hit.clone()),
            None => pending.push(k),
        }
    }
    let cache_hits = prompts.len() - pending.len();

    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let workers = options.concurrency.max(1).min(pending.len().max(1));
    let mut failure: Option<ScoringError> = None;
    let mut archive_error: Option<ScoringError> = None;

    std::thread::scope(|scope| {
        let (tx, rx) = mpsc::channel::<(usize, Result<CellOutcome, ScoringError>)>();
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, stop, pending, prompts) = (&next, &stop, &pending, &prompts);
            scope.spawn(move || loop {
                if stop.load(Ordering::SeqCst) {
                    break;
                }
                let slot = next.fetch_add(1, Ordering::SeqCst);
                let Some(&k) = pending.get(slot) else { break };
                let cell = cell_of(&alternatives[k / n], &criteria[k % n]);
                let outcome = run_chain(provider, template, cell, prompts[k].clone(), &options.cell);
                if outcome.is_err() {
                    stop.store(true, Ordering::SeqCst);
                }
                if tx.send((k, outcome)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (k, outcome) in rx {
            match outcome {
                Ok(out) => {
                    for t in out.transcripts {
                        if archive_error.is_none() {
                            if let Err(e) = archive.append(t) {
                                archive_error = Some(e);
                                stop.store(true, Ordering::SeqCst);
                            }
                        }
                    }
                    decided[k] = Some(out.transcript);
                }
                Err(err) => {
                    if let ScoringError::CellFailed { partial: Some(p), .. } = &err {
                        if archive_error.is_none() {
                            if let Err(e) = archive.append((**p).clone()) {
                                archive_error = Some(e);
                            }
                        }
                    }
                    if failure.is_none() {
                        failure = Some(err);
                    }
                }
            }
        }
    });

    if let Some(e) = archive_error {
        return Err(e);
    }
    if let Some(e) = failure {
        return Err(e);
    }

    let transcripts: Vec<PromptTranscript> =
        decided.into_iter().map(|t| t.expect("every cell is decided when no worker failed")).collect();
    let scores: Vec<Vec<Option<f64>>> =
        transcripts.chunks(n).map(|row| row.iter().map(|t| t.parsed_rating).collect()).collect();
    let worklist: Vec<CellRef> = transcripts.iter().filter(|t| !t.is_rated()).map(PromptTranscript::cell).collect();
    if !worklist.is_empty() && !options.allow_partial {
        return Err(ScoringError::Unparsed { cells: worklist });
    }
    Ok(ScoreRun {
        alternatives: alternatives.to_vec(),
        criteria: criteria.to_vec(),
        scores,
        transcripts,
        worklist,
        cache_hits,
    })
}
