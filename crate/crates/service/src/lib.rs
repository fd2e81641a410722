//! HTTP endpoints over a loaded catalog and rule set.
//!
//! * `GET /api/catalog`: the catalog with its term tokens.
//! * `POST /api/plan`: one optimization round for a transcript, preferences
//!   and the edits collected so far.
//! * `POST /api/predict`: grade estimates for a transcript.
//!
//! The server keeps no session state. Errors are `{code, message, tags}`
//! documents.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use degreeplan::catalog::{Catalog, Transcript, TranscriptEntry};
use degreeplan::grade::Grade;
use degreeplan::milp::ModelStats;
use degreeplan::model::Preferences;
use degreeplan::planner::{apply_edits, optimize, EditCommand, Plan, PlanError, Summary, Violation};
use degreeplan::rules::{predict, RuleSet};
use degreeplan::solver::{SolverConfig, Status};
use degreeplan::term::TermIndex;
use serde::{Deserialize, Serialize};

/// Shared read-only by all requests.
#[derive(Debug, Clone)]
pub struct AppState {
    pub catalog: Catalog,
    pub rules: RuleSet,
    pub solver: SolverConfig,
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/catalog", get(catalog))
        .route("/api/plan", post(plan))
        .route("/api/predict", post(predict_handler))
        .with_state(Arc::new(state))
}

pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: String,
    pub message: String,
    pub tags: Vec<String>,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> ApiError {
        ApiError { status: status.as_u16(), code: code.into(), message: message.into(), tags: Vec::new() }
    }

    fn bad_request(message: impl ToString) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", message.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}

impl From<PlanError> for ApiError {
    fn from(e: PlanError) -> Self {
        let message = e.to_string();
        match e {
            PlanError::Build(_) => ApiError::bad_request(message),
            PlanError::Infeasible { tags } => ApiError { tags, ..ApiError::new(StatusCode::CONFLICT, "infeasible", message) },
            PlanError::NoSolution => ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "no_solution", message),
            PlanError::Breach(_) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "invariant_breach", message),
            PlanError::Solve(_) | PlanError::Decode(_) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "solver_error", message),
        }
    }
}

/// A passed course. `term` is a token such as `FA2022`; absent or
/// `TRANSFER` means transfer credit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassedCourse {
    pub code: String,
    pub grade: Grade,
    #[serde(default)]
    pub term: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlanRequest {
    pub transcript: Vec<PassedCourse>,
    /// Term token to plan from; defaults to the term after the transcript.
    pub current: Option<String>,
    pub preferences: Preferences,
    pub edits: Vec<EditCommand>,
    pub time_limit_secs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanResponse {
    pub plan: Plan,
    pub summary: Summary,
    pub stats: ModelStats,
    pub status: Status,
    pub objective: f64,
    pub solve_ms: u128,
    /// Always empty; a plan breaking a rule is reported as a server fault.
    pub violations: Vec<Violation>,
    /// Preferences after the edits, as used for this round.
    pub preferences: Preferences,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PredictRequest {
    pub transcript: Vec<PassedCourse>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictResponse {
    pub estimates: BTreeMap<String, Grade>,
    /// Courses whose estimate is above the eligibility threshold.
    pub eligible: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermLabel {
    pub index: TermIndex,
    pub token: String,
}

fn transcript(catalog: &Catalog, passed: &[PassedCourse], current: Option<&str>) -> Result<Transcript, ApiError> {
    let anchor = catalog.calendar().anchor;
    let term = |t: &str| anchor.term_index(t).map_err(ApiError::bad_request);
    let mut entries = Vec::with_capacity(passed.len());
    for p in passed {
        let t = match p.term.as_deref() {
            None => None,
            Some(t) if t.eq_ignore_ascii_case("TRANSFER") => None,
            Some(t) => Some(term(t)?),
        };
        entries.push(TranscriptEntry { code: p.code.clone(), grade: p.grade, term: t });
    }
    let current = current.map(term).transpose()?;
    Transcript::new(entries, current, catalog).map_err(ApiError::bad_request)
}

async fn catalog(State(state): State<Arc<AppState>>) -> Response {
    let cal = state.catalog.calendar();
    let terms: Vec<TermLabel> = cal.terms().map(|t| TermLabel { index: t, token: cal.token(t) }).collect();
    #[derive(Serialize)]
    struct Body<'a> {
        catalog: &'a Catalog,
        terms: Vec<TermLabel>,
    }
    Json(Body { catalog: &state.catalog, terms }).into_response()
}

async fn plan(State(state): State<Arc<AppState>>, body: Result<Json<PlanRequest>, JsonRejection>) -> Result<Json<PlanResponse>, ApiError> {
    let Json(req) = body?;
    let tr = transcript(&state.catalog, &req.transcript, req.current.as_deref())?;
    let prefs = apply_edits(&req.preferences, &req.edits, &state.catalog, &tr).map_err(ApiError::bad_request)?;
    let mut config = state.solver.clone();
    if let Some(secs) = req.time_limit_secs {
        config.time_limit = Duration::try_from_secs_f64(secs).map_err(ApiError::bad_request)?;
    }
    let worker = Arc::clone(&state);
    let outcome = tokio::task::spawn_blocking(move || {
        let estimates = predict(&worker.rules, &tr);
        optimize(&worker.catalog, &tr, &prefs, &estimates, &config).map(|o| (o, prefs))
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "worker_failed", e.to_string()))?;
    let (o, prefs) = outcome?;
    Ok(Json(PlanResponse {
        plan: o.plan,
        summary: o.summary,
        stats: o.stats,
        status: o.status,
        objective: o.objective,
        solve_ms: o.solve_time.as_millis(),
        violations: Vec::new(),
        preferences: prefs,
    }))
}

async fn predict_handler(State(state): State<Arc<AppState>>, body: Result<Json<PredictRequest>, JsonRejection>) -> Result<Json<PredictResponse>, ApiError> {
    let Json(req) = body?;
    let tr = transcript(&state.catalog, &req.transcript, None)?;
    let est = predict(&state.rules, &tr);
    let eligible = est.eligible().map(|(c, _)| c.to_string()).collect();
    Ok(Json(PredictResponse { estimates: est.grades, eligible }))
}
