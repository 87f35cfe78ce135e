//! Hierarchical task network for the sorting task.
//!
//! `sortPills` decomposes into one `sortMedication` per medication (or one
//! `sortDay` sweep per day under the `byDay` sort order), and each
//! medication-day pair into `addPill`/`removePill` operators selected by the
//! wrong-time, missing-pill and extra-pill methods. Decomposition is
//! deterministic: the same state always yields the same plan.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::{
    Constraint, Day, GridDiff, Move, Placement, ScenarioError, Slot, SortOrder, TaskState, UserAction,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{med}: the goal needs {required} pills but only {supply} are available")]
    UnsatisfiableSupply { med: String, required: u32, supply: u32 },
    #[error("counterfactual {0} is the current preference")]
    DuplicateContext(String),
    #[error("no medication is taken before activities")]
    NoCounterfactualTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    #[serde(rename = "addPill")]
    AddPill,
    #[serde(rename = "removePill")]
    RemovePill,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::AddPill => "addPill",
            OperatorKind::RemovePill => "removePill",
        }
    }
}

/// A primitive step: `(addPill Levodopa 3 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Operator {
    pub kind: OperatorKind,
    pub med: String,
    pub day: Day,
    pub slot: Slot,
}

impl Operator {
    pub fn add(p: &Placement) -> Self {
        Operator {
            kind: OperatorKind::AddPill,
            med: p.med.clone(),
            day: p.day,
            slot: p.slot,
        }
    }

    pub fn remove(p: &Placement) -> Self {
        Operator {
            kind: OperatorKind::RemovePill,
            med: p.med.clone(),
            day: p.day,
            slot: p.slot,
        }
    }

    pub fn to_action(&self) -> UserAction {
        match self.kind {
            OperatorKind::AddPill => UserAction::PlacePill {
                med: self.med.clone(),
                day: self.day,
                slot: self.slot,
            },
            OperatorKind::RemovePill => UserAction::RemovePill {
                med: self.med.clone(),
                day: self.day,
                slot: self.slot,
            },
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {} {})", self.kind.name(), self.med, self.day.index(), self.slot.index())
    }
}

/// One preference value a plan was computed under.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextEntry {
    pub preference: String,
    pub medication: String,
    pub value: i64,
}

impl fmt::Display for ContextEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(preference {} {})", self.preference, self.value)
    }
}

fn context_of(state: &TaskState) -> Result<Vec<ContextEntry>, ScenarioError> {
    Ok(state
        .effective_distances()?
        .into_iter()
        .map(|(medication, value)| ContextEntry {
            preference: "beforeActivity".into(),
            medication,
            value,
        })
        .collect())
}

fn render_list<T: fmt::Display>(items: &[T]) -> String {
    let inner: Vec<String> = items.iter().map(ToString::to_string).collect();
    format!("({})", inner.join(" "))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub state_id: String,
    pub context: Vec<ContextEntry>,
    pub steps: Vec<Operator>,
}

impl Plan {
    fn form(&self, head: &str) -> String {
        format!("({head} {} {} {})", self.state_id, render_list(&self.context), render_list(&self.steps))
    }

    /// `(planFor state8 ((preference beforeActivity 1)) ((removePill ...) ...))`
    pub fn plan_form(&self) -> String {
        self.form("planFor")
    }

    /// Same shape, headed `alternativePlanFor`.
    pub fn alternative_form(&self) -> String {
        self.form("alternativePlanFor")
    }

    pub fn first(&self) -> Option<&Operator> {
        self.steps.first()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Tasks of the network. Primitive tasks are operators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Task {
    SortPills,
    SortMedication(String),
    SortDay(Day),
    SortMedicationDay { med: String, day: Day },
    RemoveExtras(String),
    Primitive(Operator),
}

struct Preconditions<'a> {
    state: &'a TaskState,
    diff: &'a GridDiff,
    order: SortOrder,
    /// Medications whose extras must be removed before any pill is added.
    clear_first: Vec<String>,
}

impl Preconditions<'_> {
    fn wrong_time<'s>(&'s self, med: &'s str, day: Day) -> impl Iterator<Item = &'s Move> + 's {
        self.diff.moves.iter().filter(move |m| m.med == med && m.from.day == day)
    }

    fn missing_pill<'s>(&'s self, med: &'s str, day: Day) -> impl Iterator<Item = &'s Placement> + 's {
        self.diff.missing.iter().filter(move |p| p.med == med && p.day == day)
    }

    fn extra_pill<'s>(&'s self, med: &'s str, day: Option<Day>) -> impl Iterator<Item = &'s Placement> + 's {
        self.diff
            .extra
            .iter()
            .filter(move |p| p.med == med && day.is_none_or(|d| p.day == d))
    }
}

/// The medication-sorting task network.
#[derive(Debug, Clone, Copy, Default)]
pub struct DomainModel;

impl DomainModel {
    fn methods(&self, task: &Task, pre: &Preconditions) -> Vec<Task> {
        let meds = || pre.state.medications.iter().map(|m| m.name.clone());
        match task {
            Task::SortPills => {
                let prelude = pre.clear_first.iter().cloned().map(Task::RemoveExtras);
                match pre.order {
                    SortOrder::ByMedication => prelude.chain(meds().map(Task::SortMedication)).collect(),
                    SortOrder::ByDay => prelude.chain(Day::all().map(Task::SortDay)).collect(),
                }
            }
            Task::SortMedication(med) => Day::all()
                .map(|day| Task::SortMedicationDay { med: med.clone(), day })
                .collect(),
            Task::SortDay(day) => meds()
                .map(|med| Task::SortMedicationDay { med, day: *day })
                .collect(),
            Task::SortMedicationDay { med, day } => {
                let mut out = Vec::new();
                if !pre.clear_first.contains(med) {
                    out.extend(pre.extra_pill(med, Some(*day)).map(|p| Task::Primitive(Operator::remove(p))));
                }
                for mv in pre.wrong_time(med, *day) {
                    let from = Placement {
                        med: med.clone(),
                        day: mv.from.day,
                        slot: mv.from.slot,
                    };
                    let to = Placement {
                        med: med.clone(),
                        day: mv.to.day,
                        slot: mv.to.slot,
                    };
                    out.push(Task::Primitive(Operator::remove(&from)));
                    out.push(Task::Primitive(Operator::add(&to)));
                }
                out.extend(pre.missing_pill(med, *day).map(|p| Task::Primitive(Operator::add(p))));
                out
            }
            Task::RemoveExtras(med) => pre
                .extra_pill(med, None)
                .map(|p| Task::Primitive(Operator::remove(p)))
                .collect(),
            Task::Primitive(_) => Vec::new(),
        }
    }

    fn expand(&self, task: Task, pre: &Preconditions, out: &mut Vec<Operator>) {
        match task {
            Task::Primitive(op) => out.push(op),
            compound => {
                for sub in self.methods(&compound, pre) {
                    self.expand(sub, pre, out);
                }
            }
        }
    }

    /// Decomposes `sortPills` for `state`.
    pub fn plan(&self, state: &TaskState) -> Result<Plan, PlanError> {
        let goal = state.goal_placements()?;
        for med in &state.medications {
            let required = goal.total(&med.name);
            if med.constraint != Constraint::Unconstrained && required > med.weekly_supply {
                return Err(PlanError::UnsatisfiableSupply {
                    med: med.name.clone(),
                    required,
                    supply: med.weekly_supply,
                });
            }
        }
        let diff = state.diff_grid()?;
        let clear_first = state
            .medications
            .iter()
            .filter(|m| would_overrun_supply(state, &diff, &m.name, m.weekly_supply))
            .map(|m| m.name.clone())
            .collect();
        let pre = Preconditions {
            state,
            diff: &diff,
            order: state.sort_order(),
            clear_first,
        };
        let mut steps = Vec::with_capacity(diff.cost());
        self.expand(Task::SortPills, &pre, &mut steps);
        Ok(Plan {
            state_id: state.id.clone(),
            context: context_of(state)?,
            steps,
        })
    }
}

/// Whether fixing `med` one day at a time would need more pills out than
/// the supply allows while later days still hold extras.
fn would_overrun_supply(state: &TaskState, diff: &GridDiff, med: &str, supply: u32) -> bool {
    let mut placed = i64::from(state.grid.total(med));
    for day in Day::all() {
        placed -= diff.extra.iter().filter(|p| p.med == med && p.day == day).count() as i64;
        placed += diff.missing.iter().filter(|p| p.med == med && p.day == day).count() as i64;
        if placed > i64::from(supply) {
            return true;
        }
    }
    false
}

pub fn plan_for(state: &TaskState) -> Result<Plan, PlanError> {
    DomainModel.plan(state)
}

/// A hypothetical before-activity distance. With no medication named, it
/// applies to every before-activity medication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterfactual {
    #[serde(default)]
    pub medication: Option<String>,
    pub distance: i64,
}

impl Counterfactual {
    pub fn distance(distance: i64) -> Self {
        Counterfactual {
            medication: None,
            distance,
        }
    }

    fn apply(&self, state: &TaskState) -> Result<TaskState, PlanError> {
        let targets: Vec<String> = match &self.medication {
            Some(m) => vec![m.clone()],
            None => state
                .medications
                .iter()
                .filter(|m| m.constraint == Constraint::BeforeActivity)
                .map(|m| m.name.clone())
                .collect(),
        };
        if targets.is_empty() {
            return Err(PlanError::NoCounterfactualTarget);
        }
        let mut next = state.clone();
        for med in targets {
            next = next.with_distance(&med, self.distance)?;
        }
        Ok(next)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlternativeEntry {
    pub counterfactual: Counterfactual,
    /// Preference context of the counterfactual state, when it could be built.
    pub context: Vec<ContextEntry>,
    pub result: Result<Plan, PlanError>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AlternativePlanSet {
    pub entries: Vec<AlternativeEntry>,
}

/// Plans under each counterfactual preference value. Failures are recorded
/// per entry; `state` itself is never modified.
pub fn alternative_plans(state: &TaskState, counterfactuals: &[Counterfactual]) -> AlternativePlanSet {
    let actual = context_of(state).ok();
    let entries = counterfactuals
        .iter()
        .map(|cf| {
            let hypothetical = cf.apply(state);
            let context = hypothetical
                .as_ref()
                .ok()
                .and_then(|s| context_of(s).ok())
                .unwrap_or_default();
            let result = hypothetical.and_then(|s| {
                if actual.as_ref() == Some(&context) {
                    return Err(PlanError::DuplicateContext(render_list(&context)));
                }
                plan_for(&s)
            });
            AlternativeEntry {
                counterfactual: cf.clone(),
                context,
                result,
            }
        })
        .collect();
    AlternativePlanSet { entries }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanCheck {
    pub valid: bool,
    pub reasons: Vec<String>,
}

/// Simulates `plan` from `state`: every step's precondition must hold when it
/// runs and the final grid must match the goal.
pub fn check_plan(state: &TaskState, plan: &Plan) -> PlanCheck {
    let mut reasons = Vec::new();
    if plan.state_id != state.id {
        reasons.push(format!("plan is for {} but the state is {}", plan.state_id, state.id));
    }
    let mut current = state.clone();
    for (i, step) in plan.steps.iter().enumerate() {
        if step.kind == OperatorKind::AddPill {
            match current.medication(&step.med) {
                Some(m) if current.grid.day_count(&step.med, step.day) + 1 > m.max_per_day => {
                    reasons.push(format!(
                        "step {} {step}: more than {} {} on {}",
                        i + 1,
                        m.max_per_day,
                        step.med,
                        step.day
                    ));
                    break;
                }
                _ => {}
            }
        }
        match current.apply_action(&step.to_action()) {
            Ok(next) => current = next,
            Err(e) => {
                reasons.push(format!("step {} {step}: {e}", i + 1));
                break;
            }
        }
    }
    if reasons.is_empty() {
        match current.diff_grid() {
            Ok(diff) if diff.is_empty() => {}
            Ok(diff) => reasons.push(format!("{} steps still needed after the plan", diff.cost())),
            Err(e) => reasons.push(e.to_string()),
        }
    }
    PlanCheck {
        valid: reasons.is_empty(),
        reasons,
    }
}
