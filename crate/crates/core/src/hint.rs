//! Need and assistance models.
//!
//! The need level is a number in `[0, 1]` pushed up by help requests,
//! hesitation and mistakes and pulled down by progress. Once it crosses the
//! assistance threshold, its band picks how direct the hint about the plan's
//! first operator is.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planner::{Operator, OperatorKind, Plan};
use crate::scenario::UserAction;

const HELP_WORDS: [&str; 7] = ["help", "stuck", "confused", "not sure", "don't know", "dont know", "where"];

pub const ENCOURAGEMENT: &str = "You're doing well. Keep going.";

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid need configuration: {0}")]
pub struct ConfigError(String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NeedConfig {
    /// Level after an explicit request for help.
    pub request_set: f64,
    pub hesitation_threshold_s: f64,
    pub hesitation_bump: f64,
    pub error_bump: f64,
    /// Multiplier applied when an action shrinks the diff.
    pub success_decay: f64,
    pub assist_threshold: f64,
    /// Lower edges of L2, L3 and L4. L1 starts at `assist_threshold`.
    pub bands: [f64; 3],
}

impl Default for NeedConfig {
    fn default() -> Self {
        NeedConfig {
            request_set: 1.0,
            hesitation_threshold_s: 5.0,
            hesitation_bump: 0.3,
            error_bump: 0.4,
            success_decay: 0.5,
            assist_threshold: 0.5,
            bands: [0.625, 0.75, 0.875],
        }
    }
}

impl NeedConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let edges = [self.assist_threshold, self.bands[0], self.bands[1], self.bands[2]];
        if edges.iter().any(|e| !e.is_finite()) || edges[0] < 0.0 || edges[3] > 1.0 {
            return Err(ConfigError("band edges must lie in [0, 1]".into()));
        }
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError("band edges must be strictly increasing".into()));
        }
        let knobs = [
            self.request_set,
            self.hesitation_threshold_s,
            self.hesitation_bump,
            self.error_bump,
            self.success_decay,
        ];
        if knobs.iter().any(|k| !k.is_finite() || *k < 0.0) {
            return Err(ConfigError("parameters must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// What an observation means for the need model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NeedEvent {
    HelpRequest,
    Hesitation { seconds: f64 },
    Error,
    Progress,
    Neutral,
}

fn asks_for_help(text: &str) -> bool {
    let lower = text.to_lowercase();
    HELP_WORDS.iter().any(|w| lower.contains(w))
}

impl NeedEvent {
    /// Classifies a user action. `costs` is the diff cost before and after a
    /// pill action; `None` means the action was rejected.
    pub fn classify(action: &UserAction, costs: Option<(usize, usize)>) -> NeedEvent {
        match action {
            UserAction::Utterance { text } if asks_for_help(text) => NeedEvent::HelpRequest,
            UserAction::Hesitate { seconds } => NeedEvent::Hesitation { seconds: *seconds },
            UserAction::PlacePill { .. } | UserAction::RemovePill { .. } => match costs {
                None => NeedEvent::Error,
                Some((before, after)) if after > before => NeedEvent::Error,
                Some((before, after)) if after < before => NeedEvent::Progress,
                Some(_) => NeedEvent::Neutral,
            },
            _ => NeedEvent::Neutral,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeedModel {
    pub level: f64,
    pub config: NeedConfig,
}

impl Default for NeedModel {
    fn default() -> Self {
        NeedModel::new(NeedConfig::default())
    }
}

impl NeedModel {
    pub fn new(config: NeedConfig) -> Self {
        NeedModel { level: 0.0, config }
    }

    pub fn with_level(mut self, level: f64) -> Self {
        self.level = clamp(level);
        self
    }

    pub fn update(&self, event: NeedEvent) -> NeedModel {
        let c = &self.config;
        let level = match event {
            NeedEvent::HelpRequest => c.request_set,
            NeedEvent::Hesitation { seconds } if seconds >= c.hesitation_threshold_s => self.level + c.hesitation_bump,
            NeedEvent::Error => self.level + c.error_bump,
            NeedEvent::Progress => self.level * c.success_decay,
            NeedEvent::Hesitation { .. } | NeedEvent::Neutral => self.level,
        };
        NeedModel {
            level: clamp(level),
            config: self.config.clone(),
        }
    }

    /// The band `level` falls into, if it reaches the assistance threshold.
    pub fn assistance_level(&self) -> Option<AssistanceLevel> {
        let c = &self.config;
        if self.level.is_nan() || self.level < c.assist_threshold {
            return None;
        }
        let above = c.bands.iter().filter(|edge| self.level >= **edge).count();
        Some(AssistanceLevel::ALL[above])
    }
}

fn clamp(level: f64) -> f64 {
    if level.is_nan() {
        0.0
    } else {
        level.clamp(0.0, 1.0)
    }
}

pub fn update_need(model: &NeedModel, event: NeedEvent) -> NeedModel {
    model.update(event)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AssistanceLevel {
    L1,
    L2,
    L3,
    L4,
}

impl AssistanceLevel {
    pub const ALL: [AssistanceLevel; 4] = [
        AssistanceLevel::L1,
        AssistanceLevel::L2,
        AssistanceLevel::L3,
        AssistanceLevel::L4,
    ];

    pub fn describe(self) -> &'static str {
        match self {
            AssistanceLevel::L1 => "encouragement",
            AssistanceLevel::L2 => "general hint",
            AssistanceLevel::L3 => "specific hint",
            AssistanceLevel::L4 => "direct instruction",
        }
    }
}

impl fmt::Display for AssistanceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssistiveAction {
    pub level: AssistanceLevel,
    pub operator: Option<Operator>,
    pub utterance: String,
}

/// Renders a hint about `op`. L1 ignores the operator.
pub fn render_utterance(op: &Operator, level: AssistanceLevel) -> String {
    match level {
        AssistanceLevel::L1 => ENCOURAGEMENT.to_string(),
        AssistanceLevel::L2 => format!("Let's work on the {} pills.", op.med),
        AssistanceLevel::L3 => format!("Look at {} for {}.", op.day, op.med),
        AssistanceLevel::L4 => match op.kind {
            OperatorKind::AddPill => format!(
                "Try placing a {} pill in the {} on {}.",
                op.med,
                op.slot.word(),
                op.day
            ),
            OperatorKind::RemovePill => format!("Try removing a {} from {}.", op.med, op.day),
        },
    }
}

pub fn select_assistance(plan: &Plan, model: &NeedModel) -> Option<AssistiveAction> {
    let op = plan.first()?;
    let level = model.assistance_level()?;
    Some(AssistiveAction {
        level,
        operator: (level != AssistanceLevel::L1).then(|| op.clone()),
        utterance: render_utterance(op, level),
    })
}
