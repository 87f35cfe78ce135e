mod support;

use axum::http::{Method, StatusCode};
use carebot_service::{app, Clock, Config};
use serde_json::{json, Value};
use support::*;

#[tokio::test]
async fn golden_plan_form() {
    let app = fixed_app();
    let id = create(&app, "state8").await;
    let (status, v) = call_json(&app, Method::GET, &format!("/sessions/{id}/plan?counterfactuals=0"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        v["plan"]["form"],
        "(planFor state8 ((preference beforeActivity 1)) \
         ((removePill Levodopa 3 1) (addPill Levodopa 3 0) (addPill Levodopa 5 2)))"
    );
    assert_eq!(
        v["alternatives"][0]["plan"]["form"],
        "(alternativePlanFor state8 ((preference beforeActivity 0)) ((addPill Levodopa 5 3)))"
    );
}

#[tokio::test]
async fn counterfactual_errors_stay_inside_entries() {
    let app = fixed_app();
    let id = create(&app, "state8").await;
    let (status, v) = call_json(&app, Method::GET, &format!("/sessions/{id}/plan?counterfactuals=1,2,Levodopa:0"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["alternatives"][0]["error"]["code"], "DUPLICATE_CONTEXT");
    assert_eq!(v["alternatives"][1]["error"]["code"], "SLOT_UNDERFLOW");
    assert!(v["alternatives"][2]["plan"].is_object());
    let (status, v) = call_json(&app, Method::GET, &format!("/sessions/{id}/plan?counterfactuals=x"), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "INVALID_COUNTERFACTUAL");
}

#[tokio::test]
async fn hesitation_leads_to_direct_hint_and_why() {
    let app = fixed_app();
    let id = create(&app, "state8").await;
    let (status, v) = call_json(&app, Method::POST, &format!("/sessions/{id}/why"), Some(json!({"question": "Why?"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "NO_CONTEXT");

    for _ in 0..2 {
        call_json(&app, Method::POST, &format!("/sessions/{id}/actions"), Some(hesitate())).await;
    }
    let (_, v) = call_json(&app, Method::GET, &format!("/sessions/{id}/hint"), None).await;
    assert_eq!(v["assistance"]["level"], "L4");
    assert_eq!(v["assistance"]["utterance"], "Try removing a Levodopa from Wednesday.");

    let (status, v) = call_json(&app, Method::POST, &format!("/sessions/{id}/why"), Some(json!({"question": "Why?"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["result"], "explanation");
    assert_eq!(v["query"]["term"], "(onDate Levodopa Wednesday)");
    assert_eq!(
        v["explanation"]["justification"],
        json!(["(onDay pill Wednesday)", "(beforeTime pill afternoon)"])
    );
    let lines: Vec<&str> = v["trace_lines"].as_array().unwrap().iter().map(|l| l.as_str().unwrap()).collect();
    assert_eq!(lines[0], "[(IsA Levodopa pill), 'Given']");
}

#[tokio::test]
async fn preference_update_replans() {
    let app = fixed_app();
    let id = create(&app, "state8").await;
    let body = json!({"preference": "(prefers user (medicationBeforeActivityBy Levodopa 0))"});
    let (status, v) = call_json(&app, Method::POST, &format!("/sessions/{id}/preferences"), Some(body)).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["plan"]["steps"].as_array().unwrap().len(), 1);
    assert_eq!(v["plan"]["steps"][0]["form"], "(addPill Levodopa 5 3)");
    assert_eq!(v["state_id"], "state9");
    let (status, v) = call_json(
        &app,
        Method::POST,
        &format!("/sessions/{id}/preferences"),
        Some(json!({"preference": "(likes user tea)"})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "INVALID_PREFERENCE");
}

#[tokio::test]
async fn request_errors() {
    let app = fixed_app();
    let (status, v) = call_json(&app, Method::GET, "/sessions/nope/state", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(v["code"], "SESSION_NOT_FOUND");

    let (status, v) = call_json(&app, Method::POST, "/sessions", Some(json!({"scenario_name": "missing"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "UNKNOWN_SCENARIO");

    let (status, v) = call_json(&app, Method::POST, "/sessions", Some(json!({"scenario": "[meds]\nA 0 x 1\n"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["detail"]["line"], 2);

    let id = create(&app, "state8").await;
    let (status, v) = call_json(
        &app,
        Method::POST,
        &format!("/sessions/{id}/actions"),
        Some(json!({"action": {"type": "remove_pill", "med": "Levodopa", "day": 0, "slot": 0}})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "NO_SUCH_PILL_AT_CELL");
    let (_, state) = call_json(&app, Method::GET, &format!("/sessions/{id}/state"), None).await;
    assert_eq!(state["state"]["id"], "state8");
    assert!((state["need"].as_f64().unwrap() - 0.8).abs() < 1e-9);

    let (status, v) = call_json(&app, Method::POST, &format!("/sessions/{id}/actions"), Some(json!({"oops": 1}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "BAD_REQUEST");

    let (status, _) = call_json(&app, Method::GET, "/healthz", None).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn unsupported_query_is_a_result_not_an_error() {
    let app = fixed_app();
    let scenario = "[meds]\nAspirin 1 unconstrained 7\n";
    let (_, v) = call_json(&app, Method::POST, "/sessions", Some(json!({"scenario": scenario}))).await;
    let id = v["id"].as_str().unwrap();
    let (status, v) = call_json(
        &app,
        Method::POST,
        &format!("/sessions/{id}/why"),
        Some(json!({"question": "why aspirin on monday?"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["result"], "no_explanation");
}

#[tokio::test]
async fn snapshots_restore_and_detect_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let config = || Config {
        storage_dir: Some(dir.path().to_path_buf()),
        clock: Clock::Fixed(0),
        ..Config::default()
    };
    let first = app(config()).unwrap();
    let id = create(&first, "state8").await;
    call(&first, Method::POST, &format!("/sessions/{id}/actions"), Some(hesitate())).await;
    let plan_uri = format!("/sessions/{id}/plan?counterfactuals=0");
    let (_, before) = call(&first, Method::GET, &plan_uri, None).await;
    let (_, state_before) = call(&first, Method::GET, &format!("/sessions/{id}/state"), None).await;

    let second = app(config()).unwrap();
    let (status, after) = call(&second, Method::GET, &plan_uri, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(before, after);
    let (_, state_after) = call(&second, Method::GET, &format!("/sessions/{id}/state"), None).await;
    assert_eq!(state_before, state_after);
    // fresh ids continue after the stored ones
    assert_ne!(create(&second, "state8").await, id);

    let (status, _) = call(&second, Method::GET, "/sessions/s999/state", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    std::fs::write(dir.path().join("s77.json"), b"{not json").unwrap();
    let third = app(config()).unwrap();
    let (status, v) = call_json(&third, Method::GET, "/sessions/s77/state", None).await;
    assert_eq!(status, StatusCode::INTERNAL_SERVER_ERROR);
    assert_eq!(v["code"], "CORRUPT_SNAPSHOT");
}

#[tokio::test]
async fn restored_session_explains_identically() {
    let dir = tempfile::tempdir().unwrap();
    let config = || Config {
        storage_dir: Some(dir.path().to_path_buf()),
        clock: Clock::Fixed(0),
        ..Config::default()
    };
    let first = app(config()).unwrap();
    let id = create(&first, "state8").await;
    for _ in 0..2 {
        call(&first, Method::POST, &format!("/sessions/{id}/actions"), Some(hesitate())).await;
    }
    call(&first, Method::GET, &format!("/sessions/{id}/hint"), None).await;
    let why = || Some(json!({"question": "Why?"}));
    let (_, a) = call_json(&first, Method::POST, &format!("/sessions/{id}/why"), why()).await;
    let second = app(config()).unwrap();
    let (_, b) = call_json(&second, Method::POST, &format!("/sessions/{id}/why"), why()).await;
    assert_eq!(a["trace_lines"], b["trace_lines"]);
    assert_eq!(a["explanation"], b["explanation"]);
}

#[tokio::test]
async fn golden_replay_is_byte_stable() {
    let a = golden_replay(&fixed_app()).await;
    let b = golden_replay(&fixed_app()).await;
    assert_eq!(a, b);
    let hint: Value = serde_json::from_slice(&a[9]).unwrap();
    assert_eq!(hint["assistance"]["utterance"], "Try placing a Levodopa pill in the morning on Wednesday.");
}

#[tokio::test]
async fn interleaved_sessions_match_serial_runs() {
    let serial = fixed_app();
    let x = golden_replay(&serial).await;
    let y = golden_replay(&serial).await;

    let shared = fixed_app();
    let (p, q) = tokio::join!(golden_replay(&shared), golden_replay(&shared));
    // ids differ between the two runs, so compare with the id removed
    let strip = |runs: &[Vec<u8>]| -> Vec<String> {
        runs.iter()
            .map(|b| {
                let mut v: Value = serde_json::from_slice(b).unwrap();
                if let Some(o) = v.as_object_mut() {
                    o.remove("id");
                }
                v.to_string()
            })
            .collect()
    };
    assert_eq!(strip(&p), strip(&x));
    assert_eq!(strip(&q), strip(&y));
}
