//! The sorting task: grid contents, medications, the activity calendar,
//! stated preferences and the log of what happened.

mod file;
mod types;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::debug;

pub use file::{load_scenario, parse_scenario};
pub use types::{
    Activity, Cell, Clock, Constraint, Day, EngineEvent, Event, EventEntry, Grid, GridEntry, Medication,
    Preference, PreferenceKind, Slot, SlotBoundaries, SortOrder, UserAction, DAY_NAMES, SLOT_WORDS,
};

use crate::knowledge::{Fact, FactStore, Source, Term};
use crate::rules::{ForwardChainer, RuleError, RuleParser, Vocabulary};

const BEFORE_ACTIVITY_RULES: &str = include_str!("../../data/before_activity.rules");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("line {line}: {error}")]
    Line { line: usize, error: Box<ScenarioError> },
    #[error("{0}")]
    Syntax(String),
    #[error("cannot read scenario: {0}")]
    Io(String),
    #[error("invalid day `{0}` (expected 0-6 or a day name)")]
    InvalidDay(String),
    #[error("invalid slot `{0}` (expected 0-3 or morning/noon/evening/bedtime)")]
    InvalidSlot(String),
    #[error("invalid clock `{0}` (expected HH:MM)")]
    InvalidClock(String),
    #[error("slot boundaries must be strictly increasing")]
    InvalidBoundaries,
    #[error("invalid constraint `{0}`")]
    InvalidConstraint(String),
    #[error("unknown medication `{0}`")]
    UnknownMedication(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("invalid preference {0}")]
    InvalidPreference(String),
    #[error("no {med} at {day} {slot}")]
    NoSuchPillAtCell { med: String, day: Day, slot: Slot },
    #[error("all {supply} {med} pills are already placed")]
    SupplyExhausted { med: String, supply: u32 },
    #[error("{med} for {activity} would need slot {slot}, before the first slot of the day")]
    SlotUnderflow { med: String, activity: String, slot: i64 },
    #[error("more than one before-activity preference for {0}")]
    ConflictingPreferences(String),
    #[error("{med} needs {required} pills on {day} but at most {max} may be taken per day")]
    DailyLimitExceeded { med: String, day: Day, required: u32, max: u32 },
    #[error(transparent)]
    Rules(#[from] RuleError),
}

impl ScenarioError {
    /// The underlying error with any line wrapper removed.
    pub fn root(&self) -> &ScenarioError {
        match self {
            ScenarioError::Line { error, .. } => error.root(),
            other => other,
        }
    }
}

/// A medication pill at a cell.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub med: String,
    pub day: Day,
    pub slot: Slot,
}

impl Placement {
    pub fn cell(&self) -> Cell {
        Cell::new(self.day, self.slot)
    }
}

/// A pill sitting at the wrong time of day.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Move {
    pub med: String,
    pub from: Cell,
    pub to: Cell,
}

/// Difference between the grid and the goal. Lists are multisets ordered by
/// medication declaration order, then day, then slot.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDiff {
    pub missing: Vec<Placement>,
    pub extra: Vec<Placement>,
    pub moves: Vec<Move>,
}

impl GridDiff {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty() && self.moves.is_empty()
    }

    /// Number of primitive steps needed to close the diff.
    pub fn cost(&self) -> usize {
        self.missing.len() + self.extra.len() + 2 * self.moves.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskState {
    pub id: String,
    pub grid: Grid,
    pub medications: Vec<Medication>,
    pub calendar: Vec<Activity>,
    pub preferences: Vec<Preference>,
    pub slot_boundaries: SlotBoundaries,
    /// Scenario facts reported with the `Given` tag.
    #[serde(default)]
    pub given: Vec<Term>,
    /// Background facts reported with the `Given knowledge` tag.
    #[serde(default)]
    pub knowledge: Vec<Term>,
    #[serde(default)]
    pub events: Vec<Event>,
}

fn next_state_id(id: &str) -> String {
    let digits = id.len() - id.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    let (stem, num) = id.split_at(id.len() - digits);
    match num.parse::<u64>() {
        Ok(n) => format!("{stem}{}", n + 1),
        Err(_) => format!("{id}1"),
    }
}

impl TaskState {
    pub fn new(id: impl Into<String>) -> Self {
        TaskState {
            id: id.into(),
            grid: Grid::new(),
            medications: Vec::new(),
            calendar: Vec::new(),
            preferences: Vec::new(),
            slot_boundaries: SlotBoundaries::default(),
            given: Vec::new(),
            knowledge: Vec::new(),
            events: Vec::new(),
        }
    }

    pub fn medication(&self, name: &str) -> Option<&Medication> {
        self.medications.iter().find(|m| m.name == name)
    }

    fn require_medication(&self, name: &str) -> Result<&Medication, ScenarioError> {
        self.medication(name).ok_or_else(|| ScenarioError::UnknownMedication(name.to_string()))
    }

    pub fn activity(&self, name: &str) -> Option<&Activity> {
        self.calendar.iter().find(|a| a.name == name)
    }

    pub fn time_to_slot(&self, clock: Clock) -> Slot {
        self.slot_boundaries.slot_of(clock)
    }

    pub fn sort_order(&self) -> SortOrder {
        self.preferences
            .iter()
            .rev()
            .find_map(|p| match p.kind() {
                PreferenceKind::SortOrder(o) => Some(o),
                _ => None,
            })
            .unwrap_or(SortOrder::ByMedication)
    }

    /// Stated distance (in slots) for each before-activity medication that
    /// has one.
    pub fn stated_distances(&self) -> Result<BTreeMap<String, i64>, ScenarioError> {
        let mut out = BTreeMap::new();
        for pref in &self.preferences {
            if let PreferenceKind::BeforeActivityBy { med, distance } = pref.kind() {
                if out.insert(med.clone(), distance).is_some() {
                    return Err(ScenarioError::ConflictingPreferences(med));
                }
            }
        }
        Ok(out)
    }

    /// Effective distance for every before-activity medication, in
    /// declaration order. Missing preferences default to 0.
    pub fn effective_distances(&self) -> Result<Vec<(String, i64)>, ScenarioError> {
        let stated = self.stated_distances()?;
        Ok(self
            .medications
            .iter()
            .filter(|m| m.constraint == Constraint::BeforeActivity)
            .map(|m| (m.name.clone(), stated.get(&m.name).copied().unwrap_or(0)))
            .collect())
    }

    /// Names that rule files must treat as constants.
    pub fn vocabulary(&self) -> Vocabulary {
        let mut vocab: Vocabulary = self.medications.iter().map(|m| m.name.clone()).collect();
        vocab.extend(self.calendar.iter().map(|a| a.name.clone()));
        vocab.extend(DAY_NAMES.iter().map(|d| d.to_string()));
        vocab.extend(SLOT_WORDS.iter().map(|s| s.to_string()));
        vocab.insert("user".into());
        vocab
    }

    fn before_activity_goals(&self, goal: &mut Grid) -> Result<(), ScenarioError> {
        let distances = self.effective_distances()?;
        if distances.is_empty() || self.calendar.is_empty() {
            return Ok(());
        }
        let mut store = FactStore::new();
        let fact = |t: Term| Fact::new(t, Source::Given).expect("ground fact");
        for activity in &self.calendar {
            let slot = self.time_to_slot(activity.clock);
            store.insert(fact(Term::compound(
                "activityAt",
                vec![
                    Term::atom(&activity.name),
                    Term::Integer(activity.day.index().into()),
                    Term::Integer(slot.index().into()),
                ],
            )));
        }
        for (med, distance) in &distances {
            let pill = Term::compound("pillOf", vec![Term::atom(med)]);
            store.insert(fact(Term::compound("isa", vec![pill, Term::atom(med)])));
            store.insert(fact(Term::compound(
                "medicationBeforeActivityBy",
                vec![Term::atom(med), Term::Integer(*distance)],
            )));
        }
        let rules = RuleParser::default()
            .with_vocabulary(self.vocabulary())
            .parse_file(BEFORE_ACTIVITY_RULES)?
            .rules;
        let closure = ForwardChainer::default().run(&store, &rules)?;
        for derivation in &closure.derivations {
            let head = &derivation.conclusion.term;
            let [Term::Compound { args: pill_args, .. }, Term::Integer(day), Term::Integer(slot), Term::Atom(activity)] =
                head.args()
            else {
                continue;
            };
            let Some(med) = pill_args.first().and_then(Term::as_atom) else {
                continue;
            };
            if *slot < 0 {
                return Err(ScenarioError::SlotUnderflow {
                    med: med.to_string(),
                    activity: activity.clone(),
                    slot: *slot,
                });
            }
            goal.add(med, Cell::new(Day::new(*day)?, Slot::new(*slot)?), 1);
        }
        Ok(())
    }

    /// Where every constrained medication should end up.
    pub fn goal_placements(&self) -> Result<Grid, ScenarioError> {
        let mut goal = Grid::new();
        for med in &self.medications {
            if let Constraint::FixedSlot(slot) = med.constraint {
                for day in Day::all() {
                    goal.add(&med.name, Cell::new(day, slot), 1);
                }
            }
        }
        self.before_activity_goals(&mut goal)?;
        for med in &self.medications {
            for day in Day::all() {
                let required = goal.day_count(&med.name, day);
                if required > med.max_per_day {
                    return Err(ScenarioError::DailyLimitExceeded {
                        med: med.name.clone(),
                        day,
                        required,
                        max: med.max_per_day,
                    });
                }
            }
        }
        for pref in &self.preferences {
            if pref.kind() == PreferenceKind::Other {
                debug!(preference = %pref, "preference not used by the planner");
            }
        }
        Ok(goal)
    }

    /// Compares the grid with the goal, pairing a surplus and a deficit of
    /// the same medication on the same day into a move.
    pub fn diff_grid(&self) -> Result<GridDiff, ScenarioError> {
        let goal = self.goal_placements()?;
        let mut diff = GridDiff::default();
        for med in &self.medications {
            for day in Day::all() {
                let mut surplus = Vec::new();
                let mut deficit = Vec::new();
                if med.constraint == Constraint::Unconstrained {
                    let over = self.grid.day_count(&med.name, day).saturating_sub(med.max_per_day);
                    let mut slots: Vec<Slot> = Slot::all()
                        .rev()
                        .flat_map(|s| std::iter::repeat_n(s, self.grid.count(&med.name, Cell::new(day, s)) as usize))
                        .take(over as usize)
                        .collect();
                    slots.sort();
                    surplus = slots;
                } else {
                    for slot in Slot::all() {
                        let cell = Cell::new(day, slot);
                        let have = self.grid.count(&med.name, cell);
                        let want = goal.count(&med.name, cell);
                        surplus.extend(std::iter::repeat_n(slot, have.saturating_sub(want) as usize));
                        deficit.extend(std::iter::repeat_n(slot, want.saturating_sub(have) as usize));
                    }
                }
                let paired = surplus.len().min(deficit.len());
                for (from, to) in surplus.iter().zip(&deficit) {
                    diff.moves.push(Move {
                        med: med.name.clone(),
                        from: Cell::new(day, *from),
                        to: Cell::new(day, *to),
                    });
                }
                let place = |slot: &Slot| Placement {
                    med: med.name.clone(),
                    day,
                    slot: *slot,
                };
                diff.extra.extend(surplus[paired..].iter().map(place));
                diff.missing.extend(deficit[paired..].iter().map(place));
            }
        }
        Ok(diff)
    }

    fn next_seq(&self) -> u64 {
        self.events.last().map_or(1, |e| e.seq + 1)
    }

    fn log(mut self, entry: EventEntry) -> Self {
        let seq = self.next_seq();
        self.events.push(Event { seq, entry });
        self
    }

    /// Returns the state after `action`. Pill and preference actions advance
    /// the state id; social cues are only logged.
    pub fn apply_action(&self, action: &UserAction) -> Result<TaskState, ScenarioError> {
        let mut next = self.clone();
        match action {
            UserAction::PlacePill { med, day, slot } => {
                let m = self.require_medication(med)?;
                if self.grid.total(med) >= m.weekly_supply {
                    return Err(ScenarioError::SupplyExhausted {
                        med: med.clone(),
                        supply: m.weekly_supply,
                    });
                }
                next.grid.add(med, Cell::new(*day, *slot), 1);
                next.id = next_state_id(&self.id);
            }
            UserAction::RemovePill { med, day, slot } => {
                self.require_medication(med)?;
                if !next.grid.remove(med, Cell::new(*day, *slot)) {
                    return Err(ScenarioError::NoSuchPillAtCell {
                        med: med.clone(),
                        day: *day,
                        slot: *slot,
                    });
                }
                next.id = next_state_id(&self.id);
            }
            UserAction::StatePreference { preference } => {
                self.validate_preference(preference)?;
                let key = preference.replacement_key(&self.medications);
                next.preferences.retain(|p| p.replacement_key(&self.medications) != key);
                next.preferences.push(preference.clone());
                next.id = next_state_id(&self.id);
            }
            UserAction::Utterance { .. } | UserAction::Hesitate { .. } => {}
        }
        Ok(next.log(EventEntry::User(action.clone())))
    }

    pub fn record(&self, event: EngineEvent) -> TaskState {
        self.clone().log(EventEntry::Engine(event))
    }

    pub(crate) fn validate_preference(&self, preference: &Preference) -> Result<(), ScenarioError> {
        if let PreferenceKind::BeforeActivityBy { med, .. } = preference.kind() {
            self.require_medication(&med)?;
        }
        Ok(())
    }

    /// A copy with the before-activity preference for `med` set to `distance`.
    pub fn with_distance(&self, med: &str, distance: i64) -> Result<TaskState, ScenarioError> {
        let pref = Preference::before_activity(med, distance);
        self.validate_preference(&pref)?;
        let mut next = self.clone();
        let key = pref.replacement_key(&self.medications);
        next.preferences.retain(|p| p.replacement_key(&self.medications) != key);
        next.preferences.push(pref);
        Ok(next)
    }
}
