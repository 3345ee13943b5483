//! Request and response payloads, and the handlers.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::{Extension, Json};
use chrono::{DateTime, Utc};
use lff_core::corpus::{Level, Puzzle, PuzzleSummary};
use lff_core::diagnose::{diagnose, DiagnoseMode, DiagnosisView};
use lff_core::engine::{run, Mode, OutcomeReport, SolveOptions};
use lff_core::parser::assemble_sections;
use lff_core::Diagnostic;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::pool::Busy;
use crate::saves::{SaveError, SavedWork};
use crate::usage::{Action, UsageEvent};
use crate::{AppState, Session};

/// Seconds a solve may run when the request does not say.
pub const DEFAULT_DEADLINE_SECS: f64 = 10.0;

/// The three input boxes and the run options.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Submission {
    #[serde(default)]
    pub sorts: String,
    #[serde(default)]
    pub vocabulary: String,
    #[serde(default)]
    pub constraints: String,
    #[serde(default, skip_serializing_if = "RunOptions::is_empty")]
    pub options: RunOptions,
}

impl Submission {
    pub fn text(&self) -> String {
        assemble_sections(&self.sorts, &self.vocabulary, &self.constraints)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_models: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeout_secs: Option<f64>,
    /// Per open sort, `[lo, hi]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BTreeMap<String, (usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry_breaking: Option<bool>,
}

impl RunOptions {
    fn is_empty(&self) -> bool {
        *self == RunOptions::default()
    }

    /// Engine options, with the deadline clamped to `max_deadline`.
    pub fn to_solve_options(&self, mode: Mode, max_deadline: Duration) -> Result<SolveOptions, ApiError> {
        let mut o = SolveOptions { mode, ..Default::default() };
        if let Some(n) = self.max_models {
            if n == 0 {
                return Err(ApiError::bad_request("maxModels must be at least 1"));
            }
            o.max_models = n;
        }
        let secs = self.timeout_secs.unwrap_or(DEFAULT_DEADLINE_SECS);
        if !(secs.is_finite() && secs > 0.0) {
            return Err(ApiError::bad_request("timeoutSecs must be positive"));
        }
        o.deadline = Duration::from_secs_f64(secs).min(max_deadline);
        if let Some(b) = &self.bounds {
            if let Some((s, _)) = b.iter().find(|(_, (lo, hi))| *lo == 0 || lo > hi) {
                return Err(ApiError::bad_request(format!("bounds for `{s}` must satisfy 1 <= lo <= hi")));
            }
            o.bounds = b.clone();
        }
        o.symmetry_breaking = self.symmetry_breaking.unwrap_or(false);
        Ok(o)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagnoseRequest {
    #[serde(flatten)]
    pub submission: Submission,
    /// `mus`, `clauses` or `approx`.
    #[serde(default = "default_kind")]
    pub kind: String,
}

fn default_kind() -> String {
    "mus".into()
}

/// A diagnostic with its plain-text rendering.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagnosticPayload {
    #[serde(flatten)]
    pub diagnostic: Diagnostic,
    pub text: String,
}

impl From<&Diagnostic> for DiagnosticPayload {
    fn from(d: &Diagnostic) -> Self {
        DiagnosticPayload { diagnostic: d.clone(), text: d.render() }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckResponse {
    pub ok: bool,
    pub diagnostics: Vec<DiagnosticPayload>,
    pub warnings: Vec<DiagnosticPayload>,
    pub text: String,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    pub fn bad_request(m: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, message: m.into() }
    }

    fn not_found() -> Self {
        ApiError { status: StatusCode::NOT_FOUND, message: "not found".into() }
    }
}

impl From<Busy> for ApiError {
    fn from(_: Busy) -> Self {
        ApiError {
            status: StatusCode::SERVICE_UNAVAILABLE,
            message: "all solver workers are busy; retry shortly".into(),
        }
    }
}

impl From<SaveError> for ApiError {
    fn from(e: SaveError) -> Self {
        match e {
            SaveError::NotFound => ApiError::not_found(),
            SaveError::NameTaken => {
                ApiError { status: StatusCode::CONFLICT, message: "a save with that name exists".into() }
            }
            SaveError::Stale => {
                ApiError { status: StatusCode::CONFLICT, message: "the save was changed elsewhere; reload it".into() }
            }
            SaveError::Io(m) => ApiError { status: StatusCode::INTERNAL_SERVER_ERROR, message: m },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut r = (self.status, Json(serde_json::json!({ "error": self.message }))).into_response();
        if self.status == StatusCode::SERVICE_UNAVAILABLE {
            r.headers_mut().insert(header::RETRY_AFTER, HeaderValue::from_static("1"));
        }
        r
    }
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed request body: {e}")))
}

fn log(state: &AppState, session: &Session, action: Action, text: String, kind: &str, start: Instant) {
    let event = UsageEvent {
        timestamp: Utc::now(),
        session_id: session.0.clone(),
        action,
        full_text: text,
        outcome_kind: kind.to_string(),
        duration_ms: start.elapsed().as_millis() as u64,
    };
    if let Err(e) = state.log.append(&event) {
        eprintln!("usage log: {e}");
    }
}

pub async fn check(
    State(state): State<Arc<AppState>>,
    Extension(session): Extension<Session>,
    body: Bytes,
) -> Result<Json<CheckResponse>, ApiError> {
    let sub: Submission = parse_body(&body)?;
    let opts = sub.options.to_solve_options(Mode::Check, state.max_deadline)?;
    let start = Instant::now();
    let text = sub.text();
    let t = text.clone();
    let out = state.pool.run(move || run(&t, &opts)).await?;
    log(&state, &session, Action::Check, text, out.kind_name(), start);
    let diagnostics = match &out.kind {
        lff_core::engine::OutcomeKind::InputErrors(d) => d.iter().map(Into::into).collect(),
        _ => Vec::new(),
    };
    Ok(Json(CheckResponse {
        ok: diagnostics.is_empty(),
        diagnostics,
        warnings: out.warnings.iter().map(Into::into).collect(),
        text: out.render(),
    }))
}

pub async fn solve(
    State(state): State<Arc<AppState>>,
    Extension(session): Extension<Session>,
    body: Bytes,
) -> Result<Json<OutcomeReport>, ApiError> {
    let sub: Submission = parse_body(&body)?;
    let opts = sub.options.to_solve_options(Mode::Solve, state.max_deadline)?;
    let start = Instant::now();
    let text = sub.text();
    let t = text.clone();
    let report = state.pool.run(move || run(&t, &opts).report()).await?;
    log(&state, &session, Action::Solve, text, report.kind, start);
    Ok(Json(report))
}

pub async fn diagnose_handler(
    State(state): State<Arc<AppState>>,
    Extension(session): Extension<Session>,
    body: Bytes,
) -> Result<Json<DiagnosisView>, ApiError> {
    let req: DiagnoseRequest = parse_body(&body)?;
    let mode: DiagnoseMode =
        req.kind.parse().map_err(|_| ApiError::bad_request("kind must be mus, clauses or approx"))?;
    let opts = req.submission.options.to_solve_options(Mode::Solve, state.max_deadline)?;
    let start = Instant::now();
    let text = req.submission.text();
    let t = text.clone();
    let view = state.pool.run(move || diagnose(&t, mode, &opts).view(&t)).await?;
    log(&state, &session, Action::Diagnose, text, view.kind, start);
    Ok(Json(view))
}

#[derive(Debug, Deserialize)]
pub struct LevelQuery {
    pub level: Option<String>,
}

pub async fn list_puzzles(
    State(state): State<Arc<AppState>>,
    Query(q): Query<LevelQuery>,
) -> Result<Json<Vec<PuzzleSummary>>, ApiError> {
    let level = q.level.as_deref().map(str::parse::<Level>).transpose().map_err(ApiError::bad_request)?;
    Ok(Json(state.corpus.list(level).into_iter().map(Puzzle::summary).collect()))
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PuzzleDetail {
    #[serde(flatten)]
    pub summary: PuzzleSummary,
    pub statement: String,
    /// Starting boxes for the editor.
    pub skeleton: Submission,
}

#[derive(Debug, Deserialize)]
pub struct SkeletonQuery {
    /// Fill the sorts and vocabulary boxes from the reference encoding.
    #[serde(default)]
    pub prefill: bool,
}

/// The sorts and vocabulary sections of a problem text.
fn declaration_boxes(text: &str) -> (String, String) {
    let mut boxes = [String::new(), String::new(), String::new()];
    let mut at = None;
    for line in text.lines() {
        match line.trim() {
            "Sorts:" => at = Some(0),
            "Vocabulary:" => at = Some(1),
            "Constraints:" => at = Some(2),
            _ => {
                if let Some(i) = at {
                    boxes[i].push_str(line);
                    boxes[i].push('\n');
                }
            }
        }
    }
    let [s, v, _] = boxes;
    (s, v)
}

pub async fn get_puzzle(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<SkeletonQuery>,
) -> Result<Json<PuzzleDetail>, ApiError> {
    let p = state.corpus.get(&id).ok_or_else(ApiError::not_found)?;
    let mut skeleton = Submission::default();
    if q.prefill {
        (skeleton.sorts, skeleton.vocabulary) = declaration_boxes(&p.encoding);
    }
    Ok(Json(PuzzleDetail { summary: p.summary(), statement: p.statement.clone(), skeleton }))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CreateSave {
    pub name: String,
    pub submission: Submission,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UpdateSave {
    pub name: Option<String>,
    pub submission: Submission,
    /// The `updatedAt` the client last saw; the update fails if it moved.
    pub updated_at: Option<DateTime<Utc>>,
}

pub async fn list_saves(
    State(state): State<Arc<AppState>>,
    Extension(session): Extension<Session>,
) -> Json<Vec<SavedWork>> {
    Json(state.saves.list(&session.0))
}

pub async fn create_save(
    State(state): State<Arc<AppState>>,
    Extension(session): Extension<Session>,
    body: Bytes,
) -> Result<(StatusCode, Json<SavedWork>), ApiError> {
    let req: CreateSave = parse_body(&body)?;
    if req.name.trim().is_empty() {
        return Err(ApiError::bad_request("a save needs a name"));
    }
    Ok((StatusCode::CREATED, Json(state.saves.create(&session.0, &req.name, req.submission)?)))
}

pub async fn get_save(
    State(state): State<Arc<AppState>>,
    Extension(session): Extension<Session>,
    Path(id): Path<String>,
) -> Result<Json<SavedWork>, ApiError> {
    Ok(Json(state.saves.get(&session.0, &id)?))
}

pub async fn update_save(
    State(state): State<Arc<AppState>>,
    Extension(session): Extension<Session>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SavedWork>, ApiError> {
    let req: UpdateSave = parse_body(&body)?;
    if req.name.as_deref().is_some_and(|n| n.trim().is_empty()) {
        return Err(ApiError::bad_request("a save needs a name"));
    }
    Ok(Json(state.saves.update(&session.0, &id, req.name.as_deref(), req.submission, req.updated_at)?))
}

pub async fn delete_save(
    State(state): State<Arc<AppState>>,
    Extension(session): Extension<Session>,
    Path(id): Path<String>,
) -> Result<StatusCode, ApiError> {
    state.saves.delete(&session.0, &id)?;
    Ok(StatusCode::NO_CONTENT)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deadline_is_clamped() {
        let o = RunOptions { timeout_secs: Some(100.0), ..Default::default() };
        assert_eq!(o.to_solve_options(Mode::Solve, Duration::from_secs(30)).unwrap().deadline, Duration::from_secs(30));
        let o = RunOptions { timeout_secs: Some(-1.0), ..Default::default() };
        assert!(o.to_solve_options(Mode::Solve, Duration::from_secs(30)).is_err());
        let o = RunOptions { max_models: Some(0), ..Default::default() };
        assert!(o.to_solve_options(Mode::Solve, Duration::from_secs(30)).is_err());
    }

    #[test]
    fn boxes_from_an_encoding() {
        let (s, v) = declaration_boxes("Sorts:\n  a.\nVocabulary:\n  name k: a.\nConstraints:\n  k = k.\n");
        assert_eq!((s.as_str(), v.as_str()), ("  a.\n", "  name k: a.\n"));
    }
}
