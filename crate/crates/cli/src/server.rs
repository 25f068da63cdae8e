//! HTTP/JSON API over review sessions.
//!
//! | method | path                            | body / result                          |
//! |--------|---------------------------------|----------------------------------------|
//! | POST   | `/sessions`                     | `{previous, new, config?}` BibTeX text |
//! | GET    | `/sessions/{id}/map`            | `srmap.map/v1`                         |
//! | GET    | `/sessions/{id}/bundles`        | `srmap.bundles/v1`                     |
//! | GET    | `/sessions/{id}/studies/{key}`  | `srmap.study/v1`                       |
//! | POST   | `/sessions/{id}/mark`           | `{key, label}`, returns the study      |
//! | GET    | `/sessions/{id}/export`         | updated BibTeX; `?engine=true` also applies engine verdicts |

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::RwLock;
use tower_http::cors::CorsLayer;

use srmap_core::corpus::{parse_bibtex_with, ParseOptions, Status};
use srmap_core::evaluation::Label;
use srmap_core::pipeline::PipelineConfig;
use srmap_core::session::{ReviewSession, SessionError};
use srmap_core::textprep::Stoplist;

pub struct AppState {
    data_dir: PathBuf,
    stoplist: Stoplist,
    sessions: RwLock<HashMap<String, Arc<RwLock<ReviewSession>>>>,
}

impl AppState {
    pub fn new(data_dir: impl Into<PathBuf>, stoplist: Stoplist) -> Self {
        AppState { data_dir: data_dir.into(), stoplist, sessions: RwLock::new(HashMap::new()) }
    }

    fn path_of(&self, id: &str) -> PathBuf {
        self.data_dir.join(format!("{id}.json"))
    }

    /// In-memory session, or the one persisted under `data_dir`.
    async fn session(&self, id: &str) -> Result<Arc<RwLock<ReviewSession>>, ApiError> {
        if !valid_id(id) {
            return Err(ApiError::not_found(format!("unknown session `{id}`")));
        }
        if let Some(s) = self.sessions.read().await.get(id) {
            return Ok(s.clone());
        }
        let path = self.path_of(id);
        if !path.exists() {
            return Err(ApiError::not_found(format!("unknown session `{id}`")));
        }
        let loaded = tokio::task::spawn_blocking(move || ReviewSession::load(&path))
            .await
            .map_err(|e| ApiError::internal(e.to_string()))??;
        let mut sessions = self.sessions.write().await;
        Ok(sessions.entry(id.to_string()).or_insert_with(|| Arc::new(RwLock::new(loaded))).clone())
    }
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, body: json!({ "error": message.into() }) }
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, message)
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, message)
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match &e {
            SessionError::StudyNotFound(_) => ApiError::not_found(e.to_string()),
            SessionError::Conflict { key, status } => ApiError {
                status: StatusCode::CONFLICT,
                body: json!({ "error": e.to_string(), "key": key, "status": status }),
            },
            _ => ApiError::internal(e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/map", get(map))
        .route("/sessions/{id}/bundles", get(bundles))
        .route("/sessions/{id}/studies/{key}", get(study))
        .route("/sessions/{id}/mark", post(mark))
        .route("/sessions/{id}/export", get(export))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

#[derive(Debug, Deserialize)]
pub struct CreateRequest {
    pub previous: String,
    pub new: String,
    #[serde(default)]
    pub config: Option<PipelineConfig>,
}

async fn create_session(State(state): State<Arc<AppState>>, Json(req): Json<CreateRequest>) -> Result<Response, ApiError> {
    let parse = |name: &str, text: &str, default_status| {
        parse_bibtex_with(text, &ParseOptions { default_status }).map_err(|e| ApiError {
            status: StatusCode::BAD_REQUEST,
            body: json!({ "error": format!("{name}: {e}"), "file": name, "line": e.line, "key": e.key }),
        })
    };
    let previous = parse("previous", &req.previous, None)?;
    let new_search = parse("new", &req.new, Some(Status::ToEvaluate))?;
    let config = req.config.unwrap_or_default();
    let id = uuid::Uuid::new_v4().to_string();
    let path = state.path_of(&id);
    let stoplist = state.stoplist.clone();
    let session_id = id.clone();
    // The session becomes visible only once analysis and persistence are done.
    let session = tokio::task::spawn_blocking(move || -> Result<ReviewSession, ApiError> {
        let s = ReviewSession::create(session_id, &previous, &new_search, &stoplist, config)
            .map_err(|e| ApiError::bad_request(e.to_string()))?;
        s.save(&path)?;
        Ok(s)
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;

    let warnings: Vec<String> = session.corpus.warnings().iter().map(|w| w.message.clone()).collect();
    let body = json!({
        "schema": "srmap.session-created/v1",
        "id": id,
        "studies": session.corpus.len(),
        "counts": session.decisions.counts,
        "warnings": warnings,
    });
    state.sessions.write().await.insert(id, Arc::new(RwLock::new(session)));
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn map(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    Ok(Json(state.session(&id).await?.read().await.map_payload()))
}

async fn bundles(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    Ok(Json(state.session(&id).await?.read().await.bundles_payload()))
}

async fn study(State(state): State<Arc<AppState>>, Path((id, key)): Path<(String, String)>) -> Result<Json<Value>, ApiError> {
    Ok(Json(state.session(&id).await?.read().await.study_detail(&key)?))
}

#[derive(Debug, Deserialize)]
pub struct MarkRequest {
    pub key: String,
    pub label: String,
}

async fn mark(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<MarkRequest>,
) -> Result<Json<Value>, ApiError> {
    let label = Label::parse(&req.label)
        .ok_or_else(|| ApiError::bad_request(format!("label must be include or exclude, got `{}`", req.label)))?;
    let handle = state.session(&id).await?;
    let mut session = handle.write().await;
    let previous = session.overrides.get(&req.key).cloned();
    session.mark(&req.key, label, chrono::Utc::now())?;
    if let Err(e) = session.save(&state.path_of(&id)) {
        match previous {
            Some(o) => session.overrides.insert(req.key.clone(), o),
            None => session.overrides.remove(&req.key),
        };
        return Err(e.into());
    }
    Ok(Json(session.study_detail(&req.key)?))
}

#[derive(Debug, Default, Deserialize)]
pub struct ExportQuery {
    #[serde(default)]
    pub engine: bool,
}

async fn export(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<ExportQuery>,
) -> Result<Response, ApiError> {
    let bib = state.session(&id).await?.read().await.export_bibtex(q.engine);
    Ok(([(header::CONTENT_TYPE, "application/x-bibtex; charset=utf-8")], bib).into_response())
}
