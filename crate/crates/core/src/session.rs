//! One user's run through the task: state, need model and the last hint.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::explain::{parse_question, ExplainError, Explainer, Explanation, Query};
use crate::hint::{select_assistance, AssistiveAction, NeedConfig, NeedEvent, NeedModel};
use crate::planner::{alternative_plans, plan_for, AlternativePlanSet, ContextEntry, Counterfactual, Plan, PlanError};
use crate::scenario::{EngineEvent, GridDiff, Preference, ScenarioError, TaskState, UserAction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Explain(#[from] ExplainError),
}

/// What a user action changed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActOutcome {
    pub diff: GridDiff,
    pub need: f64,
    pub event: NeedEvent,
    pub assistance: Option<AssistiveAction>,
}

/// Result of replacing a preference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceUpdate {
    pub plan: Plan,
    pub before: Vec<ContextEntry>,
    pub after: Vec<ContextEntry>,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub state: TaskState,
    pub need: NeedModel,
    pub last_action: Option<AssistiveAction>,
    pub last_explanation: Option<Explanation>,
}

impl Session {
    /// Starts a session. A grid that already holds misplaced or surplus
    /// pills counts as one mistake.
    pub fn new(state: TaskState, config: NeedConfig) -> Result<Self, SessionError> {
        let diff = state.diff_grid()?;
        let mut need = NeedModel::new(config);
        if !diff.moves.is_empty() || !diff.extra.is_empty() {
            need = need.update(NeedEvent::Error);
        }
        Ok(Session {
            state,
            need,
            last_action: None,
            last_explanation: None,
        })
    }

    pub fn diff(&self) -> Result<GridDiff, SessionError> {
        Ok(self.state.diff_grid()?)
    }

    pub fn plan(&self) -> Result<Plan, SessionError> {
        Ok(plan_for(&self.state)?)
    }

    pub fn alternatives(&self, counterfactuals: &[Counterfactual]) -> AlternativePlanSet {
        alternative_plans(&self.state, counterfactuals)
    }

    fn offer(&mut self) -> Result<Option<AssistiveAction>, SessionError> {
        let plan = self.plan()?;
        let action = select_assistance(&plan, &self.need);
        if let Some(a) = &action {
            self.state = self.state.record(EngineEvent::Assistance {
                level: a.level.to_string(),
                utterance: a.utterance.clone(),
            });
            self.last_action = Some(a.clone());
        }
        Ok(action)
    }

    /// Applies `action` and updates the need level. A rejected pill action
    /// still counts as a mistake before the error is returned.
    pub fn act(&mut self, action: &UserAction) -> Result<ActOutcome, SessionError> {
        let before = self.state.diff_grid()?.cost();
        let next = match self.state.apply_action(action) {
            Ok(next) => next,
            Err(e) => {
                if action.is_pill_action() {
                    self.need = self.need.update(NeedEvent::classify(action, None));
                }
                return Err(e.into());
            }
        };
        let diff = next.diff_grid()?;
        let event = NeedEvent::classify(action, Some((before, diff.cost())));
        self.state = next;
        self.need = self.need.update(event);
        if let UserAction::StatePreference { .. } = action {
            self.state = self.state.record(EngineEvent::Replanned {
                plan: self.plan()?.plan_form(),
            });
        }
        let assistance = self.offer()?;
        Ok(ActOutcome {
            diff,
            need: self.need.level,
            event,
            assistance,
        })
    }

    /// The hint the current need level calls for, if any.
    pub fn hint(&mut self) -> Result<Option<AssistiveAction>, SessionError> {
        self.offer()
    }

    pub fn parse_question(&self, question: &str) -> Result<Query, SessionError> {
        Ok(parse_question(question, self.last_action.as_ref(), &self.state)?)
    }

    pub fn why(&mut self, question: &str, explainer: &Explainer) -> Result<Explanation, SessionError> {
        let query = self.parse_question(question)?;
        let explanation = explainer.explain(&query.term, &self.state)?;
        self.state = self.state.record(EngineEvent::Explanation { query: query.term });
        self.last_explanation = Some(explanation.clone());
        Ok(explanation)
    }

    /// Replaces the matching preference and replans.
    pub fn set_preference(&mut self, preference: Preference) -> Result<PreferenceUpdate, SessionError> {
        let before = self.plan().map(|p| p.context).unwrap_or_default();
        self.act(&UserAction::StatePreference {
            preference: preference.clone(),
        })?;
        let plan = self.plan()?;
        let after = plan.context.clone();
        let changed: Vec<String> = after
            .iter()
            .filter(|e| !before.contains(e))
            .map(|e| {
                let old = before.iter().find(|b| b.medication == e.medication);
                match old {
                    Some(o) => format!("{} for {} changed from {} to {}", e.preference, e.medication, o.value, e.value),
                    None => format!("{} for {} is now {}", e.preference, e.medication, e.value),
                }
            })
            .collect();
        let summary = if changed.is_empty() {
            format!("recorded {preference}; the plan context is unchanged")
        } else {
            changed.join("; ")
        };
        Ok(PreferenceUpdate {
            plan,
            before,
            after,
            summary,
        })
    }

    pub fn trace(&self) -> Vec<String> {
        self.last_explanation
            .as_ref()
            .map(Explanation::trace_lines)
            .unwrap_or_default()
    }
}
