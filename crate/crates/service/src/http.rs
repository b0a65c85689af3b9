//! Routes:
//!
//! | method | path                      | body                          |
//! |--------|---------------------------|-------------------------------|
//! | POST   | `/sessions`               | [`SessionParams`]             |
//! | GET    | `/sessions/{id}`          |                               |
//! | POST   | `/sessions/{id}/turn`     |                               |
//! | POST   | `/sessions/{id}/score`    | `{"player": 1, "points": 120}`|
//! | POST   | `/sessions/{id}/snapshot` |                               |
//! | POST   | `/sessions/restore`       | snapshot blob                 |
//!
//! Failures answer `{"error": code, "detail": text}`.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use fairbandit_core::ArmId;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::session::{SessionError, SessionParams, SessionView, Turn};
use crate::store::SessionStore;

pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    detail: String,
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match &e {
            SessionError::UnknownSession(_) => StatusCode::NOT_FOUND,
            SessionError::SessionFinished { .. }
            | SessionError::WrongPlayer { .. }
            | SessionError::SessionExists(_) => StatusCode::CONFLICT,
            SessionError::NegativePoints(_)
            | SessionError::NonFinitePoints
            | SessionError::InvalidNormalizer(_)
            | SessionError::Config(_)
            | SessionError::UnsupportedPolicy(_) => StatusCode::UNPROCESSABLE_ENTITY,
            SessionError::CorruptSnapshot(_) => StatusCode::BAD_REQUEST,
            SessionError::Bandit(_) | SessionError::Reward(_) | SessionError::Io(_) => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        Self {
            status,
            code: e.code(),
            detail: e.to_string(),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            code: "bad_request",
            detail: e.body_text(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Json(json!({"error": self.code, "detail": self.detail}));
        (self.status, body).into_response()
    }
}

type Shared = Arc<SessionStore>;
type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScoreReport {
    pub player: ArmId,
    pub points: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnapshotResponse {
    pub session_id: String,
    pub snapshot: serde_json::Value,
    pub path: Option<String>,
}

async fn create(
    State(store): State<Shared>,
    body: Result<Json<SessionParams>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let Json(params) = body?;
    let id = store.create(&params)?;
    let view = store.with(&id, |s| Ok(s.view()))?;
    Ok((StatusCode::CREATED, Json(view)))
}

async fn state(State(store): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    Ok(Json(store.with(&id, |s| Ok(s.view()))?))
}

async fn turn(State(store): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Turn>> {
    Ok(Json(store.with(&id, |s| s.next_turn())?))
}

async fn score(
    State(store): State<Shared>,
    Path(id): Path<String>,
    body: Result<Json<ScoreReport>, JsonRejection>,
) -> ApiResult<Json<SessionView>> {
    let Json(report) = body?;
    Ok(Json(store.with(&id, |s| s.report_score(report.player, report.points))?))
}

async fn snapshot(
    State(store): State<Shared>,
    Path(id): Path<String>,
) -> ApiResult<Json<SnapshotResponse>> {
    let (blob, path) = store.snapshot(&id)?;
    let snapshot = serde_json::from_str(&blob).map_err(|e| SessionError::CorruptSnapshot(e.to_string()))?;
    Ok(Json(SnapshotResponse {
        session_id: id,
        snapshot,
        path: path.map(|p| p.display().to_string()),
    }))
}

/// Accepts either the bare snapshot or a [`SnapshotResponse`] wrapper.
async fn restore(State(store): State<Shared>, body: String) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let value: serde_json::Value =
        serde_json::from_str(&body).map_err(|e| SessionError::CorruptSnapshot(e.to_string()))?;
    let blob = match value.get("snapshot") {
        Some(inner) => inner.to_string(),
        None => body,
    };
    let id = store.restore(&blob)?;
    let view = store.with(&id, |s| Ok(s.view()))?;
    Ok((StatusCode::CREATED, Json(view)))
}

pub fn router(store: Shared) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/restore", post(restore))
        .route("/sessions/{id}", get(state))
        .route("/sessions/{id}/turn", post(turn))
        .route("/sessions/{id}/score", post(score))
        .route("/sessions/{id}/snapshot", post(snapshot))
        .with_state(store)
}
