use std::collections::HashSet;
use std::path::Path;

use super::{
    Activity, Cell, Clock, Constraint, Day, Medication, Preference, ScenarioError, Slot, SlotBoundaries, TaskState,
};
use crate::knowledge::{is_atom_token, parse_term, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Scenario,
    Meds,
    Grid,
    Calendar,
    Knowledge,
    Given,
    Prefs,
    Slots,
}

impl Section {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "scenario" => Section::Scenario,
            "meds" => Section::Meds,
            "grid" => Section::Grid,
            "calendar" => Section::Calendar,
            "knowledge" => Section::Knowledge,
            "given" => Section::Given,
            "prefs" => Section::Prefs,
            "slots" => Section::Slots,
            _ => return None,
        })
    }
}

fn syntax(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Syntax(msg.into())
}

fn name_token(token: &str) -> Result<String, ScenarioError> {
    if is_atom_token(token) {
        Ok(token.to_string())
    } else {
        Err(syntax(format!("`{token}` is not a valid name")))
    }
}

fn number<T: std::str::FromStr>(token: &str, what: &str) -> Result<T, ScenarioError> {
    token
        .parse()
        .map_err(|_| syntax(format!("expected {what}, found `{token}`")))
}

fn fields<const N: usize>(line: &str, shape: &str) -> Result<[String; N], ScenarioError> {
    let parts: Vec<String> = line.split_whitespace().map(str::to_string).collect();
    parts
        .try_into()
        .map_err(|_| syntax(format!("expected `{shape}`")))
}

fn ground_term(line: &str) -> Result<Term, ScenarioError> {
    let term = parse_term(line).map_err(|e| syntax(e.to_string()))?;
    if !term.is_ground() {
        return Err(syntax(format!("`{term}` must not contain variables")));
    }
    Ok(term)
}

fn parse_line(state: &mut TaskState, section: Section, line: &str) -> Result<(), ScenarioError> {
    match section {
        Section::Scenario => {
            let [key, value] = fields::<2>(line, "id <name>")?;
            if key != "id" {
                return Err(syntax(format!("unknown scenario key `{key}`")));
            }
            state.id = name_token(&value)?;
        }
        Section::Meds => {
            let [name, max, constraint, supply] = fields::<4>(line, "name max_per_day constraint supply")?;
            let max_per_day: u32 = number(&max, "a daily maximum")?;
            if max_per_day == 0 {
                return Err(syntax("max_per_day must be at least 1"));
            }
            let name = name_token(&name)?;
            if state.medication(&name).is_some() {
                return Err(ScenarioError::DuplicateName(name));
            }
            state.medications.push(Medication {
                name,
                max_per_day,
                constraint: Constraint::parse(&constraint)?,
                weekly_supply: number(&supply, "a weekly supply")?,
            });
        }
        Section::Grid => {
            let [med, day, slot, count] = fields::<4>(line, "med day slot count")?;
            let cell = Cell::new(Day::parse(&day)?, Slot::parse(&slot)?);
            if state.medication(&med).is_none() {
                return Err(ScenarioError::UnknownMedication(med));
            }
            state.grid.add(&med, cell, number(&count, "a pill count")?);
        }
        Section::Calendar => {
            let mut parts = line.splitn(4, char::is_whitespace).filter(|p| !p.is_empty());
            let (Some(name), Some(day), Some(clock)) = (parts.next(), parts.next(), parts.next()) else {
                return Err(syntax("expected `name day HH:MM ['label']`"));
            };
            let name = name_token(name)?;
            if state.activity(&name).is_some() {
                return Err(ScenarioError::DuplicateName(name));
            }
            let label = match parts.next().map(str::trim) {
                None | Some("") => name.clone(),
                Some(rest) => match parse_term(rest) {
                    Ok(Term::Text(t)) => t,
                    _ => return Err(syntax("activity labels are quoted, e.g. 'dance class'")),
                },
            };
            state.calendar.push(Activity {
                name,
                label,
                day: Day::parse(day)?,
                clock: Clock::parse(clock)?,
            });
        }
        Section::Knowledge => state.knowledge.push(ground_term(line)?),
        Section::Given => state.given.push(ground_term(line)?),
        Section::Prefs => {
            let pref = Preference::parse(line)?;
            state.validate_preference(&pref)?;
            state.preferences.push(pref);
        }
        Section::Slots => {
            let [a, b, c] = fields::<3>(line, "HH:MM HH:MM HH:MM")?;
            state.slot_boundaries = SlotBoundaries::new([Clock::parse(&a)?, Clock::parse(&b)?, Clock::parse(&c)?])?;
        }
    }
    Ok(())
}

/// Parses the sectioned scenario format.
pub fn parse_scenario(text: &str) -> Result<TaskState, ScenarioError> {
    let mut state = TaskState::new("state0");
    let mut section = None;
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let at = |error: ScenarioError| ScenarioError::Line {
            line: i + 1,
            error: Box::new(error),
        };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let s = Section::parse(name.trim()).ok_or_else(|| at(syntax(format!("unknown section [{name}]"))))?;
            if !seen.insert(name.trim().to_string()) {
                return Err(at(syntax(format!("section [{name}] appears twice"))));
            }
            section = Some(s);
            continue;
        }
        let s = section.ok_or_else(|| at(syntax("content before the first section header")))?;
        parse_line(&mut state, s, line).map_err(at)?;
    }
    for med in &state.medications {
        if state.grid.total(&med.name) > med.weekly_supply {
            return Err(ScenarioError::SupplyExhausted {
                med: med.name.clone(),
                supply: med.weekly_supply,
            });
        }
    }
    Ok(state)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<TaskState, ScenarioError> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| ScenarioError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_scenario(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_state8() {
        let s = parse_scenario(include_str!("../../data/scenarios/state8.scn")).unwrap();
        assert_eq!(s.id, "state8");
        assert_eq!(s.medications.len(), 2);
        assert_eq!(s.grid.total("VitaminD"), 7);
        let wed_noon = Cell::new(Day::new(3).unwrap(), Slot::new(1).unwrap());
        assert_eq!(s.grid.count("Levodopa", wed_noon), 1);
        assert_eq!(s.grid.total("Levodopa"), 1);
        assert_eq!(s.calendar[0].label, "physical therapy appointment");
        assert_eq!(s.calendar[1].clock, Clock::parse("20:00").unwrap());
        assert_eq!(s.effective_distances().unwrap(), vec![("Levodopa".to_string(), 1)]);
        assert_eq!(s.slot_boundaries, SlotBoundaries::default());
    }

    #[test]
    fn empty_scenario_is_solved() {
        let s = parse_scenario("[scenario]\nid empty\n").unwrap();
        assert!(s.diff_grid().unwrap().is_empty());
        assert!(parse_scenario("").unwrap().grid.is_empty());
    }

    #[test]
    fn bounds_errors() {
        let text = "[meds]\nLevodopa 1 beforeActivity 2\n[grid]\nLevodopa 7 0 1\n";
        let err = parse_scenario(text).unwrap_err();
        assert!(matches!(err, ScenarioError::Line { line: 4, .. }));
        assert!(matches!(err.root(), ScenarioError::InvalidDay(_)));
        let text = "[meds]\nLevodopa 1 beforeActivity 2\n[grid]\nLevodopa 1 lunch 1\n";
        assert!(matches!(parse_scenario(text).unwrap_err().root(), ScenarioError::InvalidSlot(_)));
    }

    #[test]
    fn preference_must_name_known_medication() {
        let text = "[meds]\nLevodopa 1 beforeActivity 2\n[prefs]\n(prefers user (medicationBeforeActivityBy Aspirin 1))\n";
        assert!(matches!(parse_scenario(text).unwrap_err().root(), ScenarioError::UnknownMedication(_)));
    }

    #[test]
    fn other_errors() {
        let cases = [
            "id x\n",
            "[nope]\n",
            "[meds]\nA 0 unconstrained 1\n",
            "[meds]\nA 1 sometimes 1\n",
            "[meds]\nA 1 unconstrained 1\nA 1 unconstrained 1\n",
            "[calendar]\nappt Wednesday 25:00\n",
            "[calendar]\nappt Wednesday 13:00 physical therapy\n",
            "[slots]\n11:00 10:00 20:00\n",
            "[knowledge]\n(IsA ?x activity)\n",
            "[meds]\nA 1 unconstrained 1\n[grid]\nA 0 0 2\n",
            "[meds]\n[meds]\n",
        ];
        for text in cases {
            assert!(parse_scenario(text).is_err(), "{text:?} should fail");
        }
    }

    #[test]
    fn custom_slots_and_fixed_constraints() {
        let text = "[meds]\nVitaminD 1 fixed:evening 7\n[slots]\n10:00 15:00 21:00\n";
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.medications[0].constraint, Constraint::FixedSlot(Slot::new(2).unwrap()));
        assert_eq!(s.time_to_slot(Clock::parse("20:00").unwrap()).index(), 2);
        assert_eq!(s.diff_grid().unwrap().missing.len(), 7);
    }

    #[test]
    fn load_missing_file() {
        assert!(matches!(load_scenario("/nonexistent/x.scn"), Err(ScenarioError::Io(_))));
    }
}
