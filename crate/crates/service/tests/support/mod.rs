//! Request helpers for driving the router in-process.
#![allow(dead_code)]

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use carebot_service::{app, Clock, Config};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

pub fn fixed_app() -> Router {
    app(Config {
        clock: Clock::Fixed(0),
        ..Config::default()
    })
    .unwrap()
}

pub async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes)
}

pub async fn call_json(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, bytes) = call(app, method, uri, body).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

pub async fn create(app: &Router, name: &str) -> String {
    let (status, v) = call_json(app, Method::POST, "/sessions", Some(json!({"scenario_name": name}))).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    v["id"].as_str().unwrap().to_string()
}

pub fn hesitate() -> Value {
    json!({"action": {"type": "hesitate", "seconds": 6.0}})
}

/// The golden dialogue through the API. Returns every response body in order.
pub async fn golden_replay(app: &Router) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let (_, created) = call(app, Method::POST, "/sessions", Some(json!({"scenario_name": "state8"}))).await;
    let id = serde_json::from_slice::<Value>(&created).unwrap()["id"].as_str().unwrap().to_string();
    out.push(created);
    let base = format!("/sessions/{id}");
    let steps: Vec<(Method, String, Option<Value>)> = vec![
        (Method::GET, format!("{base}/plan?counterfactuals=0"), None),
        (Method::POST, format!("{base}/actions"), Some(hesitate())),
        (Method::POST, format!("{base}/actions"), Some(hesitate())),
        (Method::GET, format!("{base}/hint"), None),
        (Method::POST, format!("{base}/why"), Some(json!({"question": "Why?"}))),
        (
            Method::POST,
            format!("{base}/actions"),
            Some(json!({"action": {"type": "remove_pill", "med": "Levodopa", "day": 3, "slot": 1}})),
        ),
        (Method::POST, format!("{base}/actions"), Some(hesitate())),
        (Method::POST, format!("{base}/actions"), Some(hesitate())),
        (Method::GET, format!("{base}/hint"), None),
        (
            Method::POST,
            format!("{base}/preferences"),
            Some(json!({"preference": "(prefers user (medicationBeforeActivityBy Levodopa 0))"})),
        ),
        (Method::GET, format!("{base}/state"), None),
    ];
    for (method, uri, body) in steps {
        out.push(call(app, method, &uri, body).await.1);
    }
    out
}
