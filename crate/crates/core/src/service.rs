//! HTTP facade over [`Session`]s.
//!
//! | method | path | body | reply |
//! |---|---|---|---|
//! | POST | `/sessions` | fixture name or CSV + criteria | session id + rankings |
//! | GET | `/sessions/{id}/rankings?rules=&criteria=&weights=` | | rankings |
//! | PATCH | `/sessions/{id}/cells` | one cell value | rankings + deltas |
//! | PUT | `/sessions/{id}/weights` | weights | rankings + deltas |
//! | POST | `/sessions/{id}/compare` | external ordering | comparison |
//! | GET | `/sessions/{id}/export` | | files + edit log |
//!
//! Errors are `{code, message, locus}` JSON objects.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::analysis::{CriteriaSelection, WeightSpec};
use crate::io::{fixtures, parse_acs_csv, parse_criteria_toml};
use crate::model::{AcsTable, AlternativeId, Criterion, Provenance};
use crate::rules::{RuleId, RuleParams};
use crate::session::{Session, SessionError, View};

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<Mutex<HashMap<Uuid, Arc<Mutex<Session>>>>>,
}

impl AppState {
    fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let unknown = || ApiError::not_found(SessionError::new("unknown_session", format!("no session `{id}`")));
        let uuid = Uuid::parse_str(id).map_err(|_| unknown())?;
        self.sessions.lock().expect("session map poisoned").get(&uuid).cloned().ok_or_else(unknown)
    }

    fn insert(&self, session: Session) -> Arc<Mutex<Session>> {
        let id = session.id();
        let handle = Arc::new(Mutex::new(session));
        self.sessions.lock().expect("session map poisoned").insert(id, handle.clone());
        handle
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: SessionError,
}

impl ApiError {
    fn bad_request(body: SessionError) -> Self {
        Self { status: StatusCode::BAD_REQUEST, body }
    }

    fn not_found(body: SessionError) -> Self {
        Self { status: StatusCode::NOT_FOUND, body }
    }
}

impl From<SessionError> for ApiError {
    fn from(body: SessionError) -> Self {
        let status = match body.code.as_str() {
            "unknown_alternative" | "unknown_session" => StatusCode::NOT_FOUND,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        Self { status, body }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::bad_request(SessionError::new("bad_request", e.body_text()))
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::bad_request(SessionError::new("bad_request", e.body_text()))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

/// `"equal"`, `{"Q1": 2, ...}` or `[2, 1, ...]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightInput {
    Named(String),
    ById(BTreeMap<String, f64>),
    Vector(Vec<f64>),
}

impl WeightInput {
    fn into_spec(self) -> Result<WeightSpec, SessionError> {
        match self {
            WeightInput::Named(s) if s == "equal" => Ok(WeightSpec::Equal),
            WeightInput::Named(s) => Err(SessionError::new("invalid_weights", format!("unknown weight preset `{s}`"))),
            WeightInput::ById(m) => Ok(WeightSpec::ById(m)),
            WeightInput::Vector(v) => Ok(WeightSpec::Vector(v)),
        }
    }
}

/// Query-string weights: `equal`, `Q1:2,Q2:1` or `2,1,1`.
fn parse_weight_query(s: &str) -> Result<WeightSpec, SessionError> {
    let bad = || SessionError::new("invalid_weights", format!("cannot read weights `{s}`")).at(serde_json::json!({"field": "weights"}));
    if s == "equal" {
        return Ok(WeightSpec::Equal);
    }
    if s.contains(':') {
        let mut map = BTreeMap::new();
        for part in s.split(',') {
            let (k, v) = part.split_once(':').ok_or_else(bad)?;
            map.insert(k.trim().to_string(), v.trim().parse().map_err(|_| bad())?);
        }
        return Ok(WeightSpec::ById(map));
    }
    s.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>().map(WeightSpec::Vector)
}

fn parse_rules(s: &str) -> Result<Vec<RuleId>, SessionError> {
    RuleId::parse_list(s).map_err(|e| SessionError::new("unknown_rule", e.to_string()).at(serde_json::json!({"field": "rules"})))
}

fn parse_criteria(s: &str) -> Result<CriteriaSelection, SessionError> {
    s.parse().map_err(|e: String| SessionError::new("unknown_criterion", e).at(serde_json::json!({"field": "criteria"})))
}

#[derive(Debug, Default, Deserialize)]
pub struct CreateSession {
    /// Name of a bundled table, e.g. `informed_assessment`.
    #[serde(default)]
    pub fixture: Option<String>,
    /// ACS table CSV.
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub criteria: Option<Vec<Criterion>>,
    /// Alternative to `criteria`: the sidecar TOML text.
    #[serde(default)]
    pub criteria_toml: Option<String>,
    #[serde(default)]
    pub weights: Option<WeightInput>,
    #[serde(default)]
    pub params: Option<RuleParams>,
}

#[derive(Debug, Serialize)]
struct Created {
    session_id: Uuid,
    rankings: crate::session::RankingsPayload,
}

fn table_from(req: &CreateSession) -> Result<AcsTable, SessionError> {
    match (&req.fixture, &req.csv) {
        (Some(name), None) => fixtures::table_by_name(name)
            .ok_or_else(|| SessionError::new("unknown_fixture", format!("no bundled table `{name}`")).at(serde_json::json!({"field": "fixture"}))),
        (None, Some(csv)) => {
            let criteria = match (&req.criteria, &req.criteria_toml) {
                (Some(c), None) => c.clone(),
                (None, Some(t)) => parse_criteria_toml(t, "criteria_toml").map_err(|e| SessionError::new("invalid_table", e.to_string()))?,
                _ => return Err(SessionError::new("bad_request", "give exactly one of `criteria` and `criteria_toml`")),
            };
            let t = parse_acs_csv(csv, &criteria, "csv").map_err(|e| SessionError::new("invalid_table", e.to_string()))?;
            AcsTable::new(t.alternatives().to_vec(), t.criteria().to_vec(), t.rows().to_vec(), Provenance::File)
                .map_err(|e| SessionError::new("invalid_table", e.to_string()))
        }
        _ => Err(SessionError::new("bad_request", "give exactly one of `fixture` and `csv`")),
    }
}

async fn create(State(state): State<AppState>, body: Result<Json<CreateSession>, JsonRejection>) -> Result<Response, ApiError> {
    let Json(req) = body?;
    let table = table_from(&req).map_err(|e| if e.code == "bad_request" { ApiError::bad_request(e) } else { e.into() })?;
    let weights = req.weights.clone().map(WeightInput::into_spec).transpose()?.unwrap_or_default();
    let session = Session::new(table, weights, req.params.unwrap_or_default())?;
    let rankings = session.rankings(&View::default())?;
    let id = session.id();
    state.insert(session);
    Ok((StatusCode::CREATED, Json(Created { session_id: id, rankings })).into_response())
}

#[derive(Debug, Default, Deserialize)]
pub struct RankingsQuery {
    pub rules: Option<String>,
    pub criteria: Option<String>,
    pub weights: Option<String>,
}

impl RankingsQuery {
    fn view(&self) -> Result<View, SessionError> {
        Ok(View {
            rules: self.rules.as_deref().map(parse_rules).transpose()?,
            criteria: self.criteria.as_deref().map(parse_criteria).transpose()?,
            weights: self.weights.as_deref().map(parse_weight_query).transpose()?,
        })
    }
}

async fn rankings(
    State(state): State<AppState>,
    Path(id): Path<String>,
    query: Result<Query<RankingsQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(q) = query?;
    let view = q.view()?;
    let session = state.get(&id)?;
    let s = session.lock().expect("session poisoned");
    Ok(Json(s.rankings(&view)?).into_response())
}

fn actor_or_default(actor: Option<String>) -> String {
    actor.filter(|a| !a.trim().is_empty()).unwrap_or_else(|| "anonymous".into())
}

#[derive(Debug, Deserialize)]
pub struct CellEdit {
    pub alternative_id: AlternativeId,
    pub criterion_id: String,
    pub value: f64,
    #[serde(default)]
    pub actor: Option<String>,
    #[serde(default)]
    pub rules: Option<String>,
    #[serde(default)]
    pub criteria: Option<String>,
}

async fn edit_cell(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<CellEdit>, JsonRejection>,
) -> Result<Response, ApiError> {
    let Json(edit) = body?;
    let view = View {
        rules: edit.rules.as_deref().map(parse_rules).transpose()?,
        criteria: edit.criteria.as_deref().map(parse_criteria).transpose()?,
        weights: None,
    };
    let session = state.get(&id)?;
    let mut s = session.lock().expect("session poisoned");
    let out = s.edit_cell(edit.alternative_id, &edit.criterion_id, edit.value, &actor_or_default(edit.actor), &view)?;
    Ok(Json(out).into_response())
}

#[derive(Debug, Deserialize)]
pub struct WeightsEdit {
    pub weights: WeightInput,
    #[serde(default)]
    pub actor: Option<String>,
}

async fn edit_weights(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<WeightsEdit>, JsonRejection>,
) -> Result<Response, ApiError> {
    let Json(edit) = body?;
    let weights = edit.weights.into_spec()?;
    let session = state.get(&id)?;
    let mut s = session.lock().expect("session poisoned");
    Ok(Json(s.edit_weights(weights, &actor_or_default(edit.actor), &View::default())?).into_response())
}

#[derive(Debug, Deserialize)]
pub struct CompareRequest {
    /// Most preferred first.
    pub ranking: Vec<AlternativeId>,
    /// `borda` (default) or a rule name.
    #[serde(default)]
    pub against: Option<String>,
}

async fn compare(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<CompareRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let Json(req) = body?;
    let session = state.get(&id)?;
    let s = session.lock().expect("session poisoned");
    let against = req.against.as_deref().unwrap_or("borda");
    Ok(Json(s.compare(against, &req.ranking)?).into_response())
}

async fn export(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let session = state.get(&id)?;
    let s = session.lock().expect("session poisoned");
    Ok(Json(s.export()?).into_response())
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/rankings", get(rankings))
        .route("/sessions/{id}/cells", patch(edit_cell))
        .route("/sessions/{id}/weights", put(edit_weights))
        .route("/sessions/{id}/compare", post(compare))
        .route("/sessions/{id}/export", get(export))
        .with_state(state)
}
