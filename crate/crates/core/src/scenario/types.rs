use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::knowledge::{parse_term, Term};

pub const DAY_NAMES: [&str; 7] = ["Sunday", "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday"];
pub const SLOT_WORDS: [&str; 4] = ["morning", "noon", "evening", "bedtime"];

/// Day of the week, Sunday = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Day(u8);

impl Day {
    pub const COUNT: u8 = 7;

    pub fn new(index: i64) -> Result<Self, ScenarioError> {
        u8::try_from(index)
            .ok()
            .filter(|d| *d < Self::COUNT)
            .map(Day)
            .ok_or_else(|| ScenarioError::InvalidDay(index.to_string()))
    }

    pub fn all() -> impl Iterator<Item = Day> {
        (0..Self::COUNT).map(Day)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn name(self) -> &'static str {
        DAY_NAMES[self.0 as usize]
    }

    /// Accepts a day name (any case, or its first three letters) or an index.
    pub fn parse(token: &str) -> Result<Self, ScenarioError> {
        if let Ok(n) = token.parse::<i64>() {
            return Day::new(n);
        }
        let lower = token.to_ascii_lowercase();
        DAY_NAMES
            .iter()
            .position(|name| {
                let name = name.to_ascii_lowercase();
                name == lower || (lower.len() == 3 && name.starts_with(&lower))
            })
            .map(|i| Day(i as u8))
            .ok_or_else(|| ScenarioError::InvalidDay(token.to_string()))
    }
}

impl TryFrom<i64> for Day {
    type Error = ScenarioError;
    fn try_from(value: i64) -> Result<Self, Self::Error> {
        Day::new(value)
    }
}

impl From<Day> for u8 {
    fn from(d: Day) -> u8 {
        d.0
    }
}

impl fmt::Display for Day {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Time-of-day compartment: 0 morning, 1 noon, 2 evening, 3 bedtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Slot(u8);

impl Slot {
    pub const COUNT: u8 = 4;

    pub fn new(index: i64) -> Result<Self, ScenarioError> {
        u8::try_from(index)
            .ok()
            .filter(|s| *s < Self::COUNT)
            .map(Slot)
            .ok_or_else(|| ScenarioError::InvalidSlot(index.to_string()))
    }

    pub fn all() -> impl DoubleEndedIterator<Item = Slot> {
        (0..Self::COUNT).map(Slot)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn word(self) -> &'static str {
        SLOT_WORDS[self.0 as usize]
    }

    /// Period word used when talking about when something happens; slot 1
    /// reads as "afternoon" rather than the compartment label "noon".
    pub fn period_word(self) -> &'static str {
        match self.0 {
            1 => "afternoon",
            _ => self.word(),
        }
    }

    pub fn parse(token: &str) -> Result<Self, ScenarioError> {
        if let Ok(n) = token.parse::<i64>() {
            return Slot::new(n);
        }
        let lower = token.to_ascii_lowercase();
        SLOT_WORDS
            .iter()
            .position(|w| *w == lower)
            .or_else(|| (lower == "afternoon" || lower == "midday").then_some(1))
            .map(|i| Slot(i as u8))
            .ok_or_else(|| ScenarioError::InvalidSlot(token.to_string()))
    }
}

impl TryFrom<i64> for Slot {
    type Error = ScenarioError;
    fn try_from(value: i64) -> Result<Self, Self::Error> {
        Slot::new(value)
    }
}

impl From<Slot> for u8 {
    fn from(s: Slot) -> u8 {
        s.0
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub day: Day,
    pub slot: Slot,
}

impl Cell {
    pub fn new(day: Day, slot: Slot) -> Self {
        Cell { day, slot }
    }

    pub fn all() -> impl Iterator<Item = Cell> {
        Day::all().flat_map(|d| Slot::all().map(move |s| Cell::new(d, s)))
    }
}

/// Minutes since midnight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Clock(u16);

impl Clock {
    pub const MINUTES_PER_DAY: u16 = 1440;

    pub fn from_minutes(minutes: u16) -> Result<Self, ScenarioError> {
        if minutes < Self::MINUTES_PER_DAY {
            Ok(Clock(minutes))
        } else {
            Err(ScenarioError::InvalidClock(minutes.to_string()))
        }
    }

    pub fn hm(hours: u16, minutes: u16) -> Result<Self, ScenarioError> {
        if minutes >= 60 {
            return Err(ScenarioError::InvalidClock(format!("{hours}:{minutes}")));
        }
        Self::from_minutes(hours.saturating_mul(60).saturating_add(minutes))
    }

    /// Parses `HH:MM`.
    pub fn parse(token: &str) -> Result<Self, ScenarioError> {
        let bad = || ScenarioError::InvalidClock(token.to_string());
        let (h, m) = token.split_once(':').ok_or_else(bad)?;
        if m.len() != 2 {
            return Err(bad());
        }
        let h: u16 = h.parse().map_err(|_| bad())?;
        let m: u16 = m.parse().map_err(|_| bad())?;
        Self::hm(h, m).map_err(|_| bad())
    }

    pub fn minutes(self) -> u16 {
        self.0
    }

    /// Spoken form: `1pm`, `8pm`, `12am`, `9:30am`.
    pub fn spoken(self) -> String {
        let (h, m) = (self.0 / 60, self.0 % 60);
        let suffix = if h < 12 { "am" } else { "pm" };
        let h12 = match h % 12 {
            0 => 12,
            h => h,
        };
        if m == 0 {
            format!("{h12}{suffix}")
        } else {
            format!("{h12}:{m:02}{suffix}")
        }
    }
}

impl fmt::Display for Clock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}:{:02}", self.0 / 60, self.0 % 60)
    }
}

impl TryFrom<String> for Clock {
    type Error = ScenarioError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Clock::parse(&value)
    }
}

impl From<Clock> for String {
    fn from(c: Clock) -> String {
        c.to_string()
    }
}

/// Three strictly increasing clock values splitting the day into the four
/// slots. A boundary value belongs to the later slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[Clock; 3]", into = "[Clock; 3]")]
pub struct SlotBoundaries([Clock; 3]);

impl SlotBoundaries {
    pub fn new(bounds: [Clock; 3]) -> Result<Self, ScenarioError> {
        if bounds.windows(2).all(|w| w[0] < w[1]) {
            Ok(SlotBoundaries(bounds))
        } else {
            Err(ScenarioError::InvalidBoundaries)
        }
    }

    pub fn values(&self) -> [Clock; 3] {
        self.0
    }

    pub fn slot_of(&self, clock: Clock) -> Slot {
        Slot(self.0.iter().filter(|b| **b <= clock).count() as u8)
    }
}

impl Default for SlotBoundaries {
    fn default() -> Self {
        SlotBoundaries([Clock(11 * 60), Clock(16 * 60), Clock(20 * 60)])
    }
}

impl TryFrom<[Clock; 3]> for SlotBoundaries {
    type Error = ScenarioError;
    fn try_from(value: [Clock; 3]) -> Result<Self, Self::Error> {
        SlotBoundaries::new(value)
    }
}

impl From<SlotBoundaries> for [Clock; 3] {
    fn from(b: SlotBoundaries) -> Self {
        b.0
    }
}

/// Multiset of medication names per grid cell.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<GridEntry>", into = "Vec<GridEntry>")]
pub struct Grid {
    cells: BTreeMap<Cell, BTreeMap<String, u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridEntry {
    pub med: String,
    pub day: Day,
    pub slot: Slot,
    pub count: u32,
}

impl Grid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self, med: &str, cell: Cell) -> u32 {
        self.cells.get(&cell).and_then(|m| m.get(med)).copied().unwrap_or(0)
    }

    pub fn add(&mut self, med: &str, cell: Cell, n: u32) {
        if n == 0 {
            return;
        }
        *self.cells.entry(cell).or_default().entry(med.to_string()).or_default() += n;
    }

    /// Removes one instance. Returns false if none was present.
    pub fn remove(&mut self, med: &str, cell: Cell) -> bool {
        let Some(meds) = self.cells.get_mut(&cell) else {
            return false;
        };
        let Some(count) = meds.get_mut(med) else {
            return false;
        };
        *count -= 1;
        if *count == 0 {
            meds.remove(med);
            if meds.is_empty() {
                self.cells.remove(&cell);
            }
        }
        true
    }

    pub fn day_count(&self, med: &str, day: Day) -> u32 {
        Slot::all().map(|s| self.count(med, Cell::new(day, s))).sum()
    }

    pub fn total(&self, med: &str) -> u32 {
        self.cells.values().filter_map(|m| m.get(med)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Non-zero entries ordered by cell, then medication name.
    pub fn entries(&self) -> Vec<GridEntry> {
        self.cells
            .iter()
            .flat_map(|(cell, meds)| {
                meds.iter().map(|(med, &count)| GridEntry {
                    med: med.clone(),
                    day: cell.day,
                    slot: cell.slot,
                    count,
                })
            })
            .collect()
    }

    /// Per-cell counts of one medication.
    pub fn cells_of(&self, med: &str) -> BTreeMap<Cell, u32> {
        self.cells
            .iter()
            .filter_map(|(cell, meds)| meds.get(med).map(|&n| (*cell, n)))
            .collect()
    }

    pub fn medications(&self) -> Vec<String> {
        let mut out: Vec<String> = self.cells.values().flat_map(|m| m.keys().cloned()).collect();
        out.sort();
        out.dedup();
        out
    }
}

impl From<Vec<GridEntry>> for Grid {
    fn from(entries: Vec<GridEntry>) -> Self {
        let mut grid = Grid::new();
        for e in entries {
            grid.add(&e.med, Cell::new(e.day, e.slot), e.count);
        }
        grid
    }
}

impl From<Grid> for Vec<GridEntry> {
    fn from(grid: Grid) -> Self {
        grid.entries()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "slot", rename_all = "snake_case")]
pub enum Constraint {
    FixedSlot(Slot),
    BeforeActivity,
    Unconstrained,
}

impl Constraint {
    /// `fixed:<slot>`, `beforeActivity` or `unconstrained`.
    pub fn parse(token: &str) -> Result<Self, ScenarioError> {
        if let Some(slot) = token.strip_prefix("fixed:") {
            return Ok(Constraint::FixedSlot(Slot::parse(slot)?));
        }
        match token {
            "beforeActivity" => Ok(Constraint::BeforeActivity),
            "unconstrained" => Ok(Constraint::Unconstrained),
            other => Err(ScenarioError::InvalidConstraint(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Medication {
    pub name: String,
    pub max_per_day: u32,
    pub constraint: Constraint,
    pub weekly_supply: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Activity {
    pub name: String,
    /// Human wording, e.g. "physical therapy appointment".
    pub label: String,
    pub day: Day,
    pub clock: Clock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SortOrder {
    ByMedication,
    ByDay,
}

/// What the planner understands of a preference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PreferenceKind {
    BeforeActivityBy { med: String, distance: i64 },
    SortOrder(SortOrder),
    Other,
}

/// A ground `(prefers user <body>)` term. Serializes as the s-expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Term", into = "Term")]
pub struct Preference {
    term: Term,
}

impl Preference {
    pub fn new(term: Term) -> Result<Self, ScenarioError> {
        let invalid = |why: &str| ScenarioError::InvalidPreference(format!("{term}: {why}"));
        if term.functor() != Some("prefers") || term.arity() != 2 {
            return Err(invalid("expected (prefers user <body>)"));
        }
        if term.args()[0].as_atom() != Some("user") {
            return Err(invalid("the subject must be `user`"));
        }
        if !term.is_ground() {
            return Err(invalid("preferences must be ground"));
        }
        let pref = Preference { term };
        if let PreferenceKind::BeforeActivityBy { distance, .. } = pref.kind() {
            if distance < 0 {
                return Err(ScenarioError::InvalidPreference(format!("{}: distance must be >= 0", pref.term)));
            }
        }
        Ok(pref)
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let term = parse_term(text).map_err(|e| ScenarioError::InvalidPreference(format!("{text}: {e}")))?;
        Preference::new(term)
    }

    pub fn before_activity(med: &str, distance: i64) -> Self {
        Preference::new(Term::compound(
            "prefers",
            vec![
                Term::atom("user"),
                Term::compound(
                    "medicationBeforeActivityBy",
                    vec![Term::atom(med), Term::Integer(distance)],
                ),
            ],
        ))
        .expect("well-formed preference")
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn body(&self) -> &Term {
        &self.term.args()[1]
    }

    pub fn kind(&self) -> PreferenceKind {
        let body = self.body();
        match (body.functor(), body.args()) {
            (Some("medicationBeforeActivityBy"), [Term::Atom(med), Term::Integer(d)]) => {
                PreferenceKind::BeforeActivityBy {
                    med: med.clone(),
                    distance: *d,
                }
            }
            (Some("sortOrder"), [Term::Atom(order)]) => match order.as_str() {
                "byMedication" => PreferenceKind::SortOrder(SortOrder::ByMedication),
                "byDay" => PreferenceKind::SortOrder(SortOrder::ByDay),
                _ => PreferenceKind::Other,
            },
            _ => PreferenceKind::Other,
        }
    }

    /// Preferences with equal keys replace each other: the body functor plus
    /// the first argument when it names a medication.
    pub fn replacement_key(&self, medications: &[Medication]) -> (String, Option<String>) {
        let body = self.body();
        let functor = body.functor().or(body.as_atom()).unwrap_or_default().to_string();
        let med = body
            .args()
            .first()
            .and_then(Term::as_atom)
            .filter(|a| medications.iter().any(|m| m.name == *a))
            .map(str::to_string);
        (functor, med)
    }
}

impl TryFrom<Term> for Preference {
    type Error = ScenarioError;
    fn try_from(term: Term) -> Result<Self, Self::Error> {
        Preference::new(term)
    }
}

impl From<Preference> for Term {
    fn from(p: Preference) -> Term {
        p.term
    }
}

impl fmt::Display for Preference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.term.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum UserAction {
    PlacePill { med: String, day: Day, slot: Slot },
    RemovePill { med: String, day: Day, slot: Slot },
    Utterance { text: String },
    Hesitate { seconds: f64 },
    StatePreference { preference: Preference },
}

impl UserAction {
    pub fn place(med: &str, day: i64, slot: i64) -> Result<Self, ScenarioError> {
        Ok(UserAction::PlacePill {
            med: med.to_string(),
            day: Day::new(day)?,
            slot: Slot::new(slot)?,
        })
    }

    pub fn remove(med: &str, day: i64, slot: i64) -> Result<Self, ScenarioError> {
        Ok(UserAction::RemovePill {
            med: med.to_string(),
            day: Day::new(day)?,
            slot: Slot::new(slot)?,
        })
    }

    pub fn is_pill_action(&self) -> bool {
        matches!(self, UserAction::PlacePill { .. } | UserAction::RemovePill { .. })
    }
}

/// Something the engine did, logged alongside user actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EngineEvent {
    Assistance { level: String, utterance: String },
    Explanation { query: Term },
    Replanned { plan: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "origin", content = "event", rename_all = "snake_case")]
pub enum EventEntry {
    User(UserAction),
    Engine(EngineEvent),
}

/// Log entry; `seq` is a logical timestamp, strictly increasing per state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub entry: EventEntry,
}
