//! HTTP front end for carebot sessions.
//!
//! Every session lives behind its own lock, so requests to one session are
//! applied one at a time while different sessions proceed independently.
//! With a storage directory configured, each committed change is written as a
//! JSON snapshot and sessions missing from memory are restored from disk.

pub mod error;
pub mod storage;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::routing::{get, post};
use axum::{Json, Router};
use carebot_core::explain::ExplainError;
use carebot_core::hint::NeedConfig;
use carebot_core::planner::{Counterfactual, Plan};
use carebot_core::scenario::{parse_scenario, Preference, UserAction};
use carebot_core::{bundle, Explainer, Session, SessionError};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

pub use error::ApiError;
use storage::{Snapshot, SnapshotStore};

/// Source of `created_at` timestamps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Clock {
    #[default]
    System,
    /// Always this many seconds since the epoch, for reproducible output.
    Fixed(u64),
}

impl Clock {
    fn now(self) -> u64 {
        match self {
            Clock::System => SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            Clock::Fixed(t) => t,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Config {
    pub storage_dir: Option<PathBuf>,
    pub scenario_dir: Option<PathBuf>,
    pub clock: Clock,
    pub need: NeedConfig,
}

type Entry = Arc<Mutex<Snapshot>>;

pub struct AppState {
    sessions: Mutex<HashMap<String, Entry>>,
    next_id: AtomicU64,
    store: Option<SnapshotStore>,
    scenario_dir: Option<PathBuf>,
    clock: Clock,
    need: NeedConfig,
    explainer: Explainer,
}

impl AppState {
    pub fn new(config: Config) -> Result<Self, ApiError> {
        config
            .need
            .validate()
            .map_err(|e| ApiError::bad_request("INVALID_NEED_CONFIG", e.to_string()))?;
        let store = config.storage_dir.map(SnapshotStore::open).transpose()?;
        let first = store.as_ref().map_or(0, SnapshotStore::max_counter) + 1;
        Ok(AppState {
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(first),
            store,
            scenario_dir: config.scenario_dir,
            clock: config.clock,
            need: config.need,
            explainer: Explainer::bundled(),
        })
    }

    fn entry(&self, id: &str) -> Result<Entry, ApiError> {
        let mut sessions = self.sessions.lock().expect("session table lock");
        if let Some(e) = sessions.get(id) {
            return Ok(e.clone());
        }
        let restored = match &self.store {
            Some(store) => store.load(id)?,
            None => None,
        };
        let snapshot = restored.ok_or_else(|| ApiError::not_found(id))?;
        let entry = Arc::new(Mutex::new(snapshot));
        sessions.insert(id.to_string(), entry.clone());
        Ok(entry)
    }

    fn persist(&self, snapshot: &Snapshot) -> Result<(), ApiError> {
        match &self.store {
            Some(store) => store.save(snapshot),
            None => Ok(()),
        }
    }

    fn read<T>(&self, id: &str, f: impl FnOnce(&Snapshot) -> T) -> Result<T, ApiError> {
        let entry = self.entry(id)?;
        let guard = entry.lock().expect("session lock");
        Ok(f(&guard))
    }

    /// Runs `f` on a copy of the session and commits the copy once it is
    /// stored, whether or not `f` reports an error.
    fn write<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> Result<T, ApiError>) -> Result<T, ApiError> {
        let entry = self.entry(id)?;
        let mut guard = entry.lock().expect("session lock");
        let mut next = guard.clone();
        let result = f(&mut next.session);
        if next != *guard {
            self.persist(&next)?;
            *guard = next;
        }
        result
    }

    fn load_scenario(&self, name: &str) -> Result<String, ApiError> {
        if !storage::valid_id(name.trim_end_matches(".scn")) {
            return Err(ApiError::bad_request("UNKNOWN_SCENARIO", format!("bad scenario name `{name}`")));
        }
        if let Some(dir) = &self.scenario_dir {
            let file = if name.ends_with(".scn") { name.to_string() } else { format!("{name}.scn") };
            if let Ok(text) = std::fs::read_to_string(dir.join(file)) {
                return Ok(text);
            }
        }
        bundle::scenario(name)
            .map(str::to_string)
            .ok_or_else(|| ApiError::bad_request("UNKNOWN_SCENARIO", format!("no scenario named `{name}`")))
    }
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request("BAD_REQUEST", e.to_string()))
}

pub fn plan_json(plan: &Plan, alternative: bool) -> Value {
    let steps: Vec<Value> = plan
        .steps
        .iter()
        .map(|op| json!({"kind": op.kind, "med": op.med, "day": op.day, "slot": op.slot, "form": op.to_string()}))
        .collect();
    json!({
        "state_id": plan.state_id,
        "context": plan.context,
        "steps": steps,
        "form": if alternative { plan.alternative_form() } else { plan.plan_form() },
    })
}

fn parse_counterfactuals(text: &str) -> Result<Vec<Counterfactual>, ApiError> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (med, d) = match t.split_once(':') {
                Some((m, d)) => (Some(m.to_string()), d),
                None => (None, t),
            };
            let distance = d.parse::<i64>().ok().filter(|d| *d >= 0).ok_or_else(|| {
                ApiError::bad_request(
                    "INVALID_COUNTERFACTUAL",
                    format!("`{t}` is not a distance or <medication>:<distance>"),
                )
            })?;
            Ok(Counterfactual { medication: med, distance })
        })
        .collect()
}

#[derive(Deserialize)]
struct CreateRequest {
    scenario: Option<String>,
    scenario_name: Option<String>,
    need_config: Option<NeedConfig>,
}

async fn create_session(State(app): State<Arc<AppState>>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let req: CreateRequest = parse_body(&body)?;
    let text = match (req.scenario, req.scenario_name) {
        (Some(text), None) => text,
        (None, Some(name)) => app.load_scenario(&name)?,
        _ => {
            return Err(ApiError::bad_request(
                "BAD_REQUEST",
                "give exactly one of `scenario` or `scenario_name`",
            ))
        }
    };
    let config = req.need_config.unwrap_or_else(|| app.need.clone());
    config
        .validate()
        .map_err(|e| ApiError::bad_request("INVALID_NEED_CONFIG", e.to_string()))?;
    let state = parse_scenario(&text)?;
    let session = Session::new(state, config)?;
    let id = format!("s{}", app.next_id.fetch_add(1, Ordering::SeqCst));
    let snapshot = Snapshot {
        id: id.clone(),
        created_at: app.clock.now(),
        session,
    };
    app.persist(&snapshot)?;
    let body = json!({
        "id": id,
        "created_at": snapshot.created_at,
        "state": snapshot.session.state,
        "need": snapshot.session.need.level,
    });
    app.sessions
        .lock()
        .expect("session table lock")
        .insert(id, Arc::new(Mutex::new(snapshot)));
    tracing::info!(session = %body["id"], "created session");
    Ok(Json(body))
}

async fn get_state(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let body = app.read(&id, |snap| {
        let s = &snap.session;
        let diff = s.diff().map_err(ApiError::from)?;
        Ok::<_, ApiError>(json!({
            "id": snap.id,
            "created_at": snap.created_at,
            "state": s.state,
            "diff": diff,
            "need": s.need.level,
            "last_action": s.last_action,
        }))
    })??;
    Ok(Json(body))
}

#[derive(Deserialize)]
struct ActionRequest {
    action: UserAction,
}

async fn post_action(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let req: ActionRequest = parse_body(&body)?;
    let body = app.write(&id, |s| {
        let out = s.act(&req.action)?;
        Ok(json!({
            "state": s.state,
            "diff": out.diff,
            "need": out.need,
            "event": out.event,
            "assistance": out.assistance,
        }))
    })?;
    Ok(Json(body))
}

async fn get_hint(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let body = app.write(&id, |s| {
        let assistance = s.hint()?;
        Ok(json!({"assistance": assistance, "need": s.need.level}))
    })?;
    Ok(Json(body))
}

#[derive(Deserialize)]
struct PlanQuery {
    counterfactuals: Option<String>,
}

async fn get_plan(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<PlanQuery>,
) -> Result<Json<Value>, ApiError> {
    let cfs = parse_counterfactuals(q.counterfactuals.as_deref().unwrap_or(""))?;
    let body = app.read(&id, |snap| {
        let s = &snap.session;
        let plan = s.plan().map_err(ApiError::from)?;
        let alternatives: Vec<Value> = s
            .alternatives(&cfs)
            .entries
            .into_iter()
            .map(|e| {
                let mut v = json!({"counterfactual": e.counterfactual, "context": e.context});
                match &e.result {
                    Ok(p) => v["plan"] = plan_json(p, true),
                    Err(err) => v["error"] = serde_json::to_value(ApiError::from(err)).expect("errors serialize"),
                }
                v
            })
            .collect();
        Ok::<_, ApiError>(json!({"plan": plan_json(&plan, false), "alternatives": alternatives}))
    })??;
    Ok(Json(body))
}

#[derive(Deserialize)]
struct WhyRequest {
    question: String,
}

async fn post_why(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let req: WhyRequest = parse_body(&body)?;
    let explainer = &app.explainer;
    let body = app.write(&id, |s| {
        let query = s.parse_question(&req.question)?;
        match s.why(&req.question, explainer) {
            Ok(x) => Ok(json!({
                "result": "explanation",
                "query": query,
                "explanation": x,
                "trace_lines": x.trace_lines(),
            })),
            Err(SessionError::Explain(e @ ExplainError::NoExplanation(_))) => Ok(json!({
                "result": "no_explanation",
                "query": query,
                "message": e.to_string(),
            })),
            Err(e) => Err(e.into()),
        }
    })?;
    Ok(Json(body))
}

#[derive(Deserialize)]
struct PreferenceRequest {
    preference: String,
}

async fn post_preference(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let req: PreferenceRequest = parse_body(&body)?;
    let pref = Preference::parse(&req.preference)?;
    let body = app.write(&id, |s| {
        let update = s.set_preference(pref)?;
        Ok(json!({
            "state_id": s.state.id,
            "plan": plan_json(&update.plan, false),
            "change": {"before": update.before, "after": update.after, "summary": update.summary},
        }))
    })?;
    Ok(Json(body))
}

async fn healthz() -> Json<Value> {
    Json(json!({"status": "ok"}))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/state", get(get_state))
        .route("/sessions/{id}/actions", post(post_action))
        .route("/sessions/{id}/hint", get(get_hint))
        .route("/sessions/{id}/plan", get(get_plan))
        .route("/sessions/{id}/why", post(post_why))
        .route("/sessions/{id}/preferences", post(post_preference))
        .with_state(state)
}

pub fn app(config: Config) -> Result<Router, ApiError> {
    Ok(router(Arc::new(AppState::new(config)?)))
}
