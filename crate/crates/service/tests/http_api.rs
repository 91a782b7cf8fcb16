use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use sonoform_core::audio::decode_wav;
use sonoform_core::catalogue::builtin_proposed;
use sonoform_core::uml::{assign_layout, parse_diagram, ClassModel};
use sonoform_service::{router, AppState, ServiceConfig};
use tower::ServiceExt;

fn library() -> ClassModel {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/library.uml");
    assign_layout(&parse_diagram(&std::fs::read_to_string(path).unwrap()).unwrap())
}

fn state() -> Arc<AppState> {
    AppState::new(library(), builtin_proposed(), ServiceConfig::default())
}

async fn call(state: &Arc<AppState>, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>, Option<String>) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header(header::CONTENT_TYPE, "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = router(state.clone()).oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let ctype = resp.headers().get(header::CONTENT_TYPE).map(|v| v.to_str().unwrap().to_string());
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes, ctype)
}

async fn json_call(state: &Arc<AppState>, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, bytes, _) = call(state, method, uri, body).await;
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn open(state: &Arc<AppState>, audience: &str) -> (String, Value) {
    let (status, v) = json_call(state, Method::POST, "/sessions", Some(json!({ "audience": audience }))).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    (v["session"]["id"].as_str().unwrap().to_string(), v)
}

#[tokio::test]
async fn session_starts_on_the_first_package() {
    let s = state();
    let (id, v) = open(&s, "novice").await;
    assert_eq!(v["session"]["focus_id"], "package:library");
    assert_eq!(v["event"]["focus_id"], "package:library");
    assert!(v["event"]["cue_url"].as_str().unwrap().starts_with("/audio/cue-"));
    let (status, info) = json_call(&s, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(info["breadcrumb"], json!(["Library", "library"]));
    assert_eq!(info["audience"], "novice");
}

#[tokio::test]
async fn empty_body_defaults_to_novice() {
    let s = state();
    let (status, v) = json_call(&s, Method::POST, "/sessions", None).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(v["session"]["audience"], "novice");
}

#[tokio::test]
async fn sessions_are_independent() {
    let s = state();
    let (a, _) = open(&s, "expert").await;
    let (b, _) = open(&s, "expert").await;
    assert_ne!(a, b);
    let (_, moved) = json_call(&s, Method::POST, &format!("/sessions/{a}/move"), Some(json!({"move": "into"}))).await;
    assert_eq!(moved["moved"], true);
    let (_, other) = json_call(&s, Method::GET, &format!("/sessions/{b}"), None).await;
    assert_eq!(other["focus_id"], "package:library");
    assert_eq!(s.session_count(), 2);
}

#[tokio::test]
async fn moves_return_playable_cues() {
    let s = state();
    let (id, _) = open(&s, "expert").await;
    let (status, ev) = json_call(&s, Method::POST, &format!("/sessions/{id}/move"), Some(json!({"move": "into"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ev["focus_id"], "class:library.Library");
    let url = ev["cue_url"].as_str().unwrap().to_string();
    let (status, bytes, ctype) = call(&s, Method::GET, &url, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ctype.as_deref(), Some("audio/wav"));
    let audio = decode_wav(&bytes).unwrap();
    assert_eq!(audio.channel_count(), 2);
    assert!(audio.duration_s() > 0.1);
    // served from the cache the second time, byte for byte
    assert_eq!(call(&s, Method::GET, &url, None).await.1, bytes);

    let (_, edge) = json_call(&s, Method::POST, &format!("/sessions/{id}/move"), Some(json!({"move": "prev_sibling"}))).await;
    assert_eq!(edge["boundary"], true);
    let (status, click, _) = call(&s, Method::GET, edge["cue_url"].as_str().unwrap(), None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(decode_wav(&click).unwrap().duration_s() < 0.1);
}

#[tokio::test]
async fn follow_is_forbidden_for_novices() {
    let s = state();
    let (id, _) = open(&s, "novice").await;
    let body = Some(json!({"move": "follow_relationship", "index": 0}));
    let (status, v) = json_call(&s, Method::POST, &format!("/sessions/{id}/move"), body).await;
    assert_eq!(status, StatusCode::FORBIDDEN);
    assert!(v["error"].as_str().unwrap().contains("follow_relationship"));
}

#[tokio::test]
async fn bad_requests_and_unknowns() {
    let s = state();
    let (id, _) = open(&s, "novice").await;
    let (status, v) = json_call(&s, Method::POST, &format!("/sessions/{id}/move"), Some(json!({"move": "jump"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["error"].is_string());
    let (status, _) = json_call(&s, Method::GET, "/sessions/not-a-session", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = json_call(&s, Method::GET, "/audio/cue-0000000000000000.wav", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) =
        json_call(&s, Method::POST, "/sessions", Some(json!({"audience": "expert", "model": "Elsewhere"}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = json_call(&s, Method::POST, "/sessions", Some(json!({"catalogue": "proposed", "model": "Library"}))).await;
    assert_eq!(status, StatusCode::CREATED);
}

#[tokio::test]
async fn unbound_concepts_conflict() {
    let mut cat = builtin_proposed();
    cat.bindings.retain(|b| b.concept != "Package");
    let s = AppState::new(library(), cat, ServiceConfig::default());
    let (status, v) = json_call(&s, Method::POST, "/sessions", Some(json!({}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert!(v["error"].as_str().unwrap().contains("Package"));
}

#[tokio::test]
async fn model_tree_has_positions_and_relationships() {
    let s = state();
    let (status, v) = json_call(&s, Method::GET, "/model", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["name"], "Library");
    assert_eq!(v["roots"][0]["id"], "package:library");
    assert_eq!(v["relationships"].as_array().unwrap().len(), 7);
    let first = &v["roots"][0]["children"][0];
    assert_eq!(first["concept"], "Class");
    assert!(first["position"]["x"].is_number());
}

#[tokio::test]
async fn walkthrough_audio_and_captions() {
    let s = state();
    let (status, wav, ctype) = call(&s, Method::GET, "/walkthrough.wav?audience=novice", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ctype.as_deref(), Some("audio/wav"));
    let audio = decode_wav(&wav).unwrap();
    assert!(audio.duration_s() > 30.0);
    let (status, vtt, ctype) = call(&s, Method::GET, "/walkthrough.vtt?audience=novice", None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(ctype.unwrap().starts_with("text/vtt"));
    let vtt = String::from_utf8(vtt).unwrap();
    assert!(vtt.starts_with("WEBVTT"));
    assert_eq!(vtt.matches(" --> ").count(), 29);
}

#[tokio::test]
async fn idle_sessions_expire() {
    let config = ServiceConfig { idle_timeout: Duration::ZERO, ..ServiceConfig::default() };
    let s = AppState::new(library(), builtin_proposed(), config);
    let (id, _) = open(&s, "novice").await;
    assert_eq!(s.sweep(), 1);
    assert_eq!(s.session_count(), 0);
    let (status, _) = json_call(&s, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let kept = state();
    open(&kept, "novice").await;
    assert_eq!(kept.sweep(), 0);
    assert_eq!(kept.session_count(), 1);
}

#[tokio::test]
async fn concurrent_moves_on_one_session_are_serialized() {
    let s = state();
    let (id, _) = open(&s, "expert").await;
    let mut tasks = Vec::new();
    for _ in 0..8 {
        let s = s.clone();
        let uri = format!("/sessions/{id}/move");
        tasks.push(tokio::spawn(async move { json_call(&s, Method::POST, &uri, Some(json!({"move": "repeat_cue"}))).await }));
    }
    for t in tasks {
        assert_eq!(t.await.unwrap().0, StatusCode::OK);
    }
    let (_, info) = json_call(&s, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(info["history"].as_array().unwrap().len(), 1);
}
