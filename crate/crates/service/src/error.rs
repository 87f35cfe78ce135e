use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use carebot_core::explain::ExplainError;
use carebot_core::planner::PlanError;
use carebot_core::rules::RuleError;
use carebot_core::scenario::ScenarioError;
use carebot_core::SessionError;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Error body returned by every endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
    #[serde(skip)]
    pub status: u16,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            code: code.into(),
            message: message.into(),
            detail: None,
            status: status.as_u16(),
        }
    }

    pub fn bad_request(code: &str, message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn not_found(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "SESSION_NOT_FOUND", format!("no session `{id}`"))
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

fn rule_code(e: &RuleError) -> &'static str {
    match e {
        RuleError::Parse(_) => "RULE_PARSE",
        RuleError::Malformed(_) | RuleError::File { .. } => "RULE_MALFORMED",
        RuleError::RangeRestrictionViolation { .. } => "RANGE_RESTRICTION_VIOLATION",
        RuleError::BuiltinFirst(_) => "BUILTIN_FIRST",
        RuleError::UngroundedBuiltin { .. } => "UNGROUNDED_BUILTIN",
        RuleError::BuiltinArity { .. } => "BUILTIN_ARITY",
        RuleError::InsufficientlyGround { .. } => "INSUFFICIENTLY_GROUND",
        RuleError::NonGroundHead(_) => "NON_GROUND_HEAD",
        RuleError::DepthExceeded(_) => "DEPTH_EXCEEDED",
    }
}

fn scenario_code(e: &ScenarioError) -> &'static str {
    match e.root() {
        ScenarioError::Line { .. } | ScenarioError::Syntax(_) => "SCENARIO_SYNTAX",
        ScenarioError::Io(_) => "SCENARIO_IO",
        ScenarioError::InvalidDay(_) => "INVALID_DAY",
        ScenarioError::InvalidSlot(_) => "INVALID_SLOT",
        ScenarioError::InvalidClock(_) => "INVALID_CLOCK",
        ScenarioError::InvalidBoundaries => "INVALID_BOUNDARIES",
        ScenarioError::InvalidConstraint(_) => "INVALID_CONSTRAINT",
        ScenarioError::UnknownMedication(_) => "UNKNOWN_MEDICATION",
        ScenarioError::DuplicateName(_) => "DUPLICATE_NAME",
        ScenarioError::InvalidPreference(_) => "INVALID_PREFERENCE",
        ScenarioError::NoSuchPillAtCell { .. } => "NO_SUCH_PILL_AT_CELL",
        ScenarioError::SupplyExhausted { .. } => "SUPPLY_EXHAUSTED",
        ScenarioError::SlotUnderflow { .. } => "SLOT_UNDERFLOW",
        ScenarioError::ConflictingPreferences(_) => "CONFLICTING_PREFERENCES",
        ScenarioError::DailyLimitExceeded { .. } => "DAILY_LIMIT_EXCEEDED",
        ScenarioError::Rules(r) => rule_code(r),
    }
}

fn scenario_detail(e: &ScenarioError) -> Option<Value> {
    let line = match e {
        ScenarioError::Line { line, .. } => Some(*line),
        _ => None,
    };
    let inner = match e.root() {
        ScenarioError::NoSuchPillAtCell { med, day, slot } => json!({"med": med, "day": day, "slot": slot}),
        ScenarioError::SupplyExhausted { med, supply } => json!({"med": med, "supply": supply}),
        ScenarioError::SlotUnderflow { med, activity, slot } => {
            json!({"med": med, "activity": activity, "slot": slot})
        }
        ScenarioError::DailyLimitExceeded { med, day, required, max } => {
            json!({"med": med, "day": day, "required": required, "max": max})
        }
        _ => json!({}),
    };
    let mut detail = inner;
    if let Some(line) = line {
        detail["line"] = json!(line);
    }
    (detail != json!({})).then_some(detail)
}

impl From<&ScenarioError> for ApiError {
    fn from(e: &ScenarioError) -> Self {
        let mut err = ApiError::bad_request(scenario_code(e), e.to_string());
        err.detail = scenario_detail(e);
        err
    }
}

impl From<&PlanError> for ApiError {
    fn from(e: &PlanError) -> Self {
        match e {
            PlanError::Scenario(s) => s.into(),
            PlanError::UnsatisfiableSupply { med, required, supply } => {
                ApiError::bad_request("UNSATISFIABLE_SUPPLY", e.to_string())
                    .with_detail(json!({"med": med, "required": required, "supply": supply}))
            }
            PlanError::DuplicateContext(_) => ApiError::bad_request("DUPLICATE_CONTEXT", e.to_string()),
            PlanError::NoCounterfactualTarget => ApiError::bad_request("NO_COUNTERFACTUAL_TARGET", e.to_string()),
        }
    }
}

impl From<&ExplainError> for ApiError {
    fn from(e: &ExplainError) -> Self {
        match e {
            ExplainError::NoContext => ApiError::bad_request("NO_CONTEXT", e.to_string()),
            ExplainError::UnrecognizedQuestion(_) => ApiError::bad_request("UNRECOGNIZED_QUESTION", e.to_string()),
            ExplainError::NoExplanation(_) => ApiError::bad_request("NO_EXPLANATION", e.to_string()),
            ExplainError::Rules(r) => ApiError::bad_request(rule_code(r), e.to_string()),
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match &e {
            SessionError::Scenario(s) => s.into(),
            SessionError::Plan(p) => p.into(),
            SessionError::Explain(x) => x.into(),
        }
    }
}

impl From<ScenarioError> for ApiError {
    fn from(e: ScenarioError) -> Self {
        (&e).into()
    }
}
