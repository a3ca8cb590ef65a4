//! Editable deliberation sessions: a working table, weights and an edit log,
//! with rankings recomputed after every change.

use std::collections::BTreeMap;

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::aggregation::{compare_rankings, AggregationResult, RankComparison};
use crate::analysis::{rank_table, AnalysisError, CriteriaSelection, RankingRequest, WeightSpec};
use crate::io::{format_acs_csv, format_atable, format_criteria_toml, format_etable};
use crate::model::{AcsTable, AlternativeId, ModelError, Provenance};
use crate::rules::{EvaluationTable, RuleId, RuleParams, RuleResult};

/// Failure of a session operation, with a stable machine-readable code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionError {
    pub code: String,
    pub message: String,
    /// Where the problem is: a cell, a criterion, a query field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locus: Option<serde_json::Value>,
}

impl SessionError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Self { code: code.to_string(), message: message.into(), locus: None }
    }

    pub fn at(mut self, locus: serde_json::Value) -> Self {
        self.locus = Some(locus);
        self
    }
}

impl std::fmt::Display for SessionError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for SessionError {}

impl From<AnalysisError> for SessionError {
    fn from(e: AnalysisError) -> Self {
        let code = match &e {
            AnalysisError::Model(ModelError::UnknownCriterion(_)) | AnalysisError::UnknownWeight(_) => "unknown_criterion",
            AnalysisError::Model(ModelError::InvalidWeights(_))
            | AnalysisError::MissingWeight(_)
            | AnalysisError::WeightCount { .. } => "invalid_weights",
            _ => "engine_error",
        };
        SessionError::new(code, e.to_string())
    }
}

/// One entry of the append-only edit log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditRecord {
    pub seq: u64,
    pub actor: String,
    /// RFC 3339, UTC.
    pub timestamp: String,
    #[serde(flatten)]
    pub edit: Edit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Edit {
    Cell { alternative_id: AlternativeId, criterion_id: String, previous: f64, value: f64 },
    Weights { previous: WeightSpec, weights: WeightSpec },
}

/// What a ranking read or a post-edit recompute covers.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct View {
    /// Rule names or codes; all rules when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rules: Option<Vec<RuleId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criteria: Option<CriteriaSelection>,
    /// Overrides the session weights for this read only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightSpec>,
}

/// Everything a client needs to display rankings without computing any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingsPayload {
    pub session_id: Uuid,
    pub criteria: Vec<String>,
    pub weights: Vec<f64>,
    pub params: RuleParams,
    pub results: Vec<RuleResult>,
    pub etable: EvaluationTable,
    pub atable: AggregationResult,
    /// Most preferred first, per rule and for `borda`.
    pub orders: BTreeMap<String, Vec<AlternativeId>>,
}

/// Change of one alternative under one rule between two recomputes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankChange {
    pub rule: String,
    pub alternative_id: AlternativeId,
    pub rank_before: f64,
    pub rank_after: f64,
    pub raw_before: f64,
    pub raw_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditResponse {
    pub rankings: RankingsPayload,
    /// Cells of the rule results whose rank or raw value moved. Empty for a
    /// no-op edit.
    pub deltas: Vec<RankChange>,
    pub edit: Option<EditRecord>,
}

/// What `export` hands back: the CLI's file outputs plus the edit log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionExport {
    pub session_id: Uuid,
    /// File name to contents: `table.csv`, `table.criteria.toml`,
    /// `etable.csv`, `atable.csv`.
    pub files: BTreeMap<String, String>,
    pub edit_log: Vec<EditRecord>,
}

#[derive(Debug, Clone)]
pub struct Session {
    id: Uuid,
    initial_table: AcsTable,
    initial_weights: WeightSpec,
    table: AcsTable,
    weights: WeightSpec,
    params: RuleParams,
    log: Vec<EditRecord>,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl Session {
    pub fn new(table: AcsTable, weights: WeightSpec, params: RuleParams) -> Result<Self, SessionError> {
        let s = Self {
            id: Uuid::new_v4(),
            initial_table: table.clone(),
            initial_weights: weights.clone(),
            table,
            weights,
            params,
            log: Vec::new(),
        };
        s.rankings(&View::default())?;
        Ok(s)
    }

    pub fn id(&self) -> Uuid {
        self.id
    }

    pub fn table(&self) -> &AcsTable {
        &self.table
    }

    pub fn initial_table(&self) -> &AcsTable {
        &self.initial_table
    }

    pub fn weights(&self) -> &WeightSpec {
        &self.weights
    }

    pub fn params(&self) -> &RuleParams {
        &self.params
    }

    pub fn log(&self) -> &[EditRecord] {
        &self.log
    }

    fn request(&self, view: &View) -> RankingRequest {
        RankingRequest {
            criteria: view.criteria.clone().unwrap_or_default(),
            weights: view.weights.clone().unwrap_or_else(|| self.weights.clone()),
            rules: view.rules.clone().unwrap_or_else(|| RuleId::ALL.to_vec()),
            params: self.params,
        }
    }

    fn payload(&self, table: &AcsTable, weights: &WeightSpec, view: &View) -> Result<RankingsPayload, SessionError> {
        let mut request = self.request(view);
        if view.weights.is_none() {
            request.weights = weights.clone();
        }
        let r = rank_table(table, &request)?;
        let ids: Vec<AlternativeId> = table.alternatives().iter().map(|a| a.id).collect();
        let mut orders: BTreeMap<String, Vec<AlternativeId>> = r
            .evaluation
            .results
            .iter()
            .map(|res| (res.rule.name().to_string(), res.ranks.preference_order().iter().map(|&i| ids[i]).collect()))
            .collect();
        orders.insert("borda".into(), r.aggregate.order());
        Ok(RankingsPayload {
            session_id: self.id,
            criteria: r.criteria,
            weights: r.weights,
            params: r.params,
            results: r.evaluation.results,
            etable: r.evaluation.etable,
            atable: r.aggregate,
            orders,
        })
    }

    pub fn rankings(&self, view: &View) -> Result<RankingsPayload, SessionError> {
        self.payload(&self.table, &self.weights, view)
    }

    fn deltas(before: &RankingsPayload, after: &RankingsPayload) -> Vec<RankChange> {
        let mut out = Vec::new();
        for (b, a) in before.results.iter().zip(&after.results) {
            for (i, alt) in after.etable.alternatives().iter().enumerate() {
                let (rb, ra) = (b.ranks.as_slice()[i], a.ranks.as_slice()[i]);
                let (vb, va) = (b.raw_values[i], a.raw_values[i]);
                if rb != ra || vb != va {
                    out.push(RankChange {
                        rule: a.rule.name().to_string(),
                        alternative_id: alt.id,
                        rank_before: rb,
                        rank_after: ra,
                        raw_before: vb,
                        raw_after: va,
                    });
                }
            }
        }
        out
    }

    /// Sets one cell. The value must lie within the criterion's scale.
    pub fn edit_cell(
        &mut self,
        alternative: AlternativeId,
        criterion: &str,
        value: f64,
        actor: &str,
        view: &View,
    ) -> Result<EditResponse, SessionError> {
        let locus = serde_json::json!({ "alternative_id": alternative, "criterion_id": criterion });
        let i = self
            .table
            .alternative_index(alternative)
            .ok_or_else(|| SessionError::new("unknown_alternative", format!("no alternative {alternative}")).at(locus.clone()))?;
        let j = self
            .table
            .criterion_index(criterion)
            .ok_or_else(|| SessionError::new("unknown_criterion", format!("no criterion `{criterion}`")).at(locus.clone()))?;
        let c = &self.table.criteria()[j];
        if !value.is_finite() || !c.in_scale(value) {
            return Err(SessionError::new(
                "out_of_scale",
                format!("{value} is outside the scale of `{}`: [{}, {}]", c.id, c.scale_min, c.scale_max),
            )
            .at(serde_json::json!({
                "alternative_id": alternative,
                "criterion_id": criterion,
                "scale_min": c.scale_min,
                "scale_max": c.scale_max,
            })));
        }
        let previous = self.table.score(i, j);
        let before = self.rankings(view)?;
        let next = self
            .table
            .with_score(alternative, criterion, value, Provenance::ManualEdit)
            .map_err(|e| SessionError::new("invalid_edit", e.to_string()).at(locus))?;
        let after = self.payload(&next, &self.weights, view)?;
        self.table = next;
        let record = self.push(actor, Edit::Cell { alternative_id: alternative, criterion_id: criterion.to_string(), previous, value });
        Ok(EditResponse { deltas: Self::deltas(&before, &after), rankings: after, edit: Some(record) })
    }

    pub fn edit_weights(&mut self, weights: WeightSpec, actor: &str, view: &View) -> Result<EditResponse, SessionError> {
        let before = self.rankings(view)?;
        // Validate against the full table so later views cannot fail.
        self.payload(&self.table, &weights, &View::default())?;
        let after = self.payload(&self.table, &weights, view)?;
        let previous = std::mem::replace(&mut self.weights, weights.clone());
        let record = self.push(actor, Edit::Weights { previous, weights });
        Ok(EditResponse { deltas: Self::deltas(&before, &after), rankings: after, edit: Some(record) })
    }

    fn push(&mut self, actor: &str, edit: Edit) -> EditRecord {
        let record = EditRecord { seq: self.log.len() as u64 + 1, actor: actor.to_string(), timestamp: now(), edit };
        self.log.push(record.clone());
        record
    }

    /// Compares an external ordering (most preferred first) with one of the
    /// session's orders (`borda` or a rule name).
    pub fn compare(&self, against: &str, ranking: &[AlternativeId]) -> Result<RankComparison, SessionError> {
        let payload = self.rankings(&View::default())?;
        let ours = payload.orders.get(against).ok_or_else(|| {
            SessionError::new("unknown_ordering", format!("no ordering named `{against}`"))
                .at(serde_json::json!({ "field": "against" }))
        })?;
        compare_rankings(ours, ranking).map_err(|e| SessionError::new("invalid_ranking", e.to_string()))
    }

    /// The same bytes `rank --out` and `aggregate --out` write for the
    /// current table with default parameters and the session weights.
    pub fn export(&self) -> Result<SessionExport, SessionError> {
        let payload = self.rankings(&View::default())?;
        let mut files = BTreeMap::new();
        files.insert("table.csv".to_string(), format_acs_csv(&self.table));
        files.insert("table.criteria.toml".to_string(), format_criteria_toml(self.table.criteria()));
        files.insert("etable.csv".to_string(), format_etable(&payload.etable));
        files.insert("atable.csv".to_string(), format_atable(&payload.atable));
        Ok(SessionExport { session_id: self.id, files, edit_log: self.log.clone() })
    }

    /// Replays an edit log from an initial table and weights.
    pub fn replay(initial: &AcsTable, weights: &WeightSpec, log: &[EditRecord]) -> Result<(AcsTable, WeightSpec), SessionError> {
        let mut table = initial.clone();
        let mut w = weights.clone();
        for r in log {
            match &r.edit {
                Edit::Cell { alternative_id, criterion_id, value, .. } => {
                    table = table
                        .with_score(*alternative_id, criterion_id, *value, Provenance::ManualEdit)
                        .map_err(|e| SessionError::new("invalid_edit", format!("edit {}: {e}", r.seq)))?;
                }
                Edit::Weights { weights, .. } => w = weights.clone(),
            }
        }
        Ok((table, w))
    }

    /// True when replaying the log from the initial state gives the current
    /// table and weights.
    pub fn log_is_consistent(&self) -> bool {
        Self::replay(&self.initial_table, &self.initial_weights, &self.log)
            .is_ok_and(|(t, w)| t == self.table && w == self.weights)
    }
}
