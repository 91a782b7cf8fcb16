use std::sync::Arc;
use std::time::Instant;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use sonoform_core::nav::{NavError, NavEvent, NavMove, NavState};
use sonoform_core::protocol::{model_view, CreateSessionRequest, ModelView, MoveResponse, SessionCreated, SessionInfo};
use sonoform_core::sonifier::Audience;
use uuid::Uuid;

use crate::state::{AppState, Session};
use crate::ApiError;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/move", post(move_session))
        .route("/audio/{file}", get(audio))
        .route("/model", get(model))
        .route("/walkthrough.wav", get(walkthrough_wav))
        .route("/walkthrough.vtt", get(walkthrough_vtt))
        .with_state(state)
}

fn respond(state: &AppState, event: NavEvent, audience: Audience) -> MoveResponse {
    state.remember_cue(&event.cue_id, &event.cue, audience);
    let cue_url = format!("/audio/{}.wav", event.cue_id);
    MoveResponse { event, cue_url }
}

fn info(state: &AppState, id: Uuid, nav: &NavState) -> SessionInfo {
    SessionInfo {
        id: id.to_string(),
        audience: nav.audience,
        focus: nav.focus,
        focus_id: state.model.element_id(nav.focus),
        breadcrumb: state.model.breadcrumb(nav.focus),
        history: nav.history.iter().map(|&e| state.model.element_id(e)).collect(),
    }
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    body: Option<Json<CreateSessionRequest>>,
) -> Result<(StatusCode, Json<SessionCreated>), ApiError> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    if let Some(name) = req.model.as_deref().filter(|n| *n != state.model.name) {
        return Err(ApiError::NotFound(format!("unknown model {name}")));
    }
    if let Some(name) = req.catalogue.as_deref().filter(|n| *n != state.catalogue.name) {
        return Err(ApiError::NotFound(format!("unknown catalogue {name}")));
    }
    if let Some(concept) = state.unbound_concept() {
        return Err(ApiError::Conflict(format!("concept \"{concept}\" is used by the model but not bound in the catalogue")));
    }
    let audience = req.audience.unwrap_or(Audience::Novice);
    let nav = NavState::new(&state.model, audience).map_err(|e| ApiError::Conflict(e.to_string()))?;
    let id = Uuid::new_v4();
    let event = respond(&state, nav.current(&state.model), audience);
    let session = info(&state, id, &nav);
    state
        .sessions
        .write()
        .insert(id, Arc::new(tokio::sync::Mutex::new(Session { nav, last_seen: Instant::now() })));
    tracing::debug!(%id, ?audience, "session created");
    Ok((StatusCode::CREATED, Json(SessionCreated { session, event })))
}

fn lookup(state: &AppState, id: &str) -> Result<(Uuid, Arc<tokio::sync::Mutex<Session>>), ApiError> {
    let uuid = Uuid::parse_str(id).map_err(|_| ApiError::NotFound(format!("unknown session {id}")))?;
    let session = state.sessions.read().get(&uuid).cloned();
    session.map(|s| (uuid, s)).ok_or_else(|| ApiError::NotFound(format!("unknown session {id}")))
}

async fn get_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<SessionInfo>, ApiError> {
    let (uuid, session) = lookup(&state, &id)?;
    let mut s = session.lock().await;
    s.last_seen = Instant::now();
    Ok(Json(info(&state, uuid, &s.nav)))
}

async fn move_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<NavMove>, JsonRejection>,
) -> Result<Json<MoveResponse>, ApiError> {
    let Json(mv) = body.map_err(|e| ApiError::BadRequest(e.body_text()))?;
    let (_, session) = lookup(&state, &id)?;
    let mut s = session.lock().await;
    s.last_seen = Instant::now();
    let audience = s.nav.audience;
    let event = s.nav.navigate(&state.model, mv).map_err(|e| match e {
        NavError::Forbidden(_) => ApiError::Forbidden(e.to_string()),
        NavError::EmptyModel => ApiError::Conflict(e.to_string()),
    })?;
    Ok(Json(respond(&state, event, audience)))
}

fn wav_response(bytes: Vec<u8>) -> impl IntoResponse {
    ([(header::CONTENT_TYPE, "audio/wav"), (header::CACHE_CONTROL, "public, max-age=31536000, immutable")], bytes)
}

async fn audio(State(state): State<Arc<AppState>>, Path(file): Path<String>) -> Result<impl IntoResponse, ApiError> {
    let id = file.strip_suffix(".wav").unwrap_or(&file);
    let bytes = state.cue_wav(id).await?;
    Ok(wav_response(bytes.as_ref().clone()))
}

async fn model(State(state): State<Arc<AppState>>) -> Json<ModelView> {
    Json(model_view(&state.model))
}

#[derive(Debug, Deserialize)]
struct AudienceQuery {
    audience: Option<Audience>,
}

async fn walkthrough_wav(
    State(state): State<Arc<AppState>>,
    Query(q): Query<AudienceQuery>,
) -> Result<impl IntoResponse, ApiError> {
    let w = state.walkthrough(q.audience.unwrap_or(Audience::Expert)).await?;
    Ok(wav_response(w.wav.clone()))
}

async fn walkthrough_vtt(
    State(state): State<Arc<AppState>>,
    Query(q): Query<AudienceQuery>,
) -> Result<impl IntoResponse, ApiError> {
    let w = state.walkthrough(q.audience.unwrap_or(Audience::Expert)).await?;
    Ok(([(header::CONTENT_TYPE, "text/vtt; charset=utf-8")], w.vtt.clone()))
}
