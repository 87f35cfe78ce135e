use carebot_core::hint::AssistiveAction;
use carebot_core::planner::AlternativePlanSet;
use carebot_core::scenario::{GridDiff, TaskState, UserAction};
use carebot_core::session::ActOutcome;
use carebot_core::{Explainer, NeedConfig, Session, SessionError};
use clap::ValueEnum;
use serde_json::{json, Value};

use crate::command::{Command, CommandError, USAGE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Lines printed for one command.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Reply {
    pub lines: Vec<String>,
    pub quit: bool,
}

impl Reply {
    fn lines(lines: Vec<String>) -> Self {
        Reply { lines, quit: false }
    }
}

/// One session plus the explainer, driven by text commands. Both the REPL and
/// the script runner go through [`Engine::execute_line`].
pub struct Engine {
    session: Session,
    explainer: Explainer,
    format: Format,
}

fn diff_summary(d: &GridDiff) -> String {
    let cost = d.cost();
    format!(
        "missing {}, extra {}, moves {} ({cost} step{})",
        d.missing.len(),
        d.extra.len(),
        d.moves.len(),
        if cost == 1 { "" } else { "s" }
    )
}

fn robot_line(a: &AssistiveAction) -> String {
    format!("robot [{}]: {}", a.level, a.utterance)
}

impl Engine {
    pub fn new(state: TaskState, format: Format) -> Result<Self, SessionError> {
        Ok(Engine {
            session: Session::new(state, NeedConfig::default())?,
            explainer: Explainer::bundled(),
            format,
        })
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    fn need_line(&self) -> String {
        let need = &self.session.need;
        match need.assistance_level() {
            Some(l) => format!("need: {:.2} ({l} {})", need.level, l.describe()),
            None => format!("need: {:.2}", need.level),
        }
    }

    fn error(&self, e: impl ToString) -> Vec<String> {
        match self.format {
            Format::Text => vec![format!("error: {}", e.to_string())],
            Format::Json => vec![json!({"error": e.to_string()}).to_string()],
        }
    }

    pub fn execute_line(&mut self, line: &str) -> Reply {
        match Command::parse(line) {
            Ok(cmd) => self.execute(&cmd),
            Err(CommandError::Empty) => Reply::default(),
            Err(e @ CommandError::Unknown(_)) => {
                let mut lines = self.error(&e);
                if self.format == Format::Text {
                    lines.extend(USAGE.lines().map(str::to_string));
                }
                Reply::lines(lines)
            }
            Err(e) => Reply::lines(self.error(e)),
        }
    }

    pub fn execute(&mut self, cmd: &Command) -> Reply {
        let lines = match cmd {
            Command::Quit => return Reply { lines: vec![], quit: true },
            Command::Help => USAGE.lines().map(str::to_string).collect(),
            Command::Act(action) => self.act(action),
            Command::Hint => self.hint(),
            Command::Plan(cfs) => self.plan(cfs),
            Command::Why(q) => self.why(q),
            Command::Pref(p) => self.pref(p.clone()),
            Command::State => self.state(),
            Command::Trace => self.trace(),
        };
        Reply::lines(lines)
    }

    fn act(&mut self, action: &UserAction) -> Vec<String> {
        match self.session.act(action) {
            Ok(out) => match self.format {
                Format::Text => self.act_text(action, &out),
                Format::Json => vec![json!({
                    "state_id": self.session.state.id,
                    "diff": out.diff,
                    "need": out.need,
                    "event": out.event,
                    "assistance": out.assistance,
                })
                .to_string()],
            },
            Err(e) => match self.format {
                Format::Text => {
                    let mut lines = self.error(&e);
                    lines.push(self.need_line());
                    lines
                }
                Format::Json => vec![json!({"error": e.to_string(), "need": self.session.need.level}).to_string()],
            },
        }
    }

    fn act_text(&self, action: &UserAction, out: &ActOutcome) -> Vec<String> {
        let id = &self.session.state.id;
        let mut lines = Vec::new();
        match action {
            UserAction::PlacePill { med, day, slot } => lines.push(format!("{id}: placed {med} on {day} {slot}")),
            UserAction::RemovePill { med, day, slot } => lines.push(format!("{id}: removed {med} from {day} {slot}")),
            _ => {}
        }
        lines.push(format!("diff: {}", diff_summary(&out.diff)));
        lines.push(self.need_line());
        lines.extend(out.assistance.as_ref().map(robot_line));
        lines
    }

    fn hint(&mut self) -> Vec<String> {
        match self.session.hint() {
            Err(e) => self.error(e),
            Ok(a) => match self.format {
                Format::Json => vec![json!({"assistance": a, "need": self.session.need.level}).to_string()],
                Format::Text => match a {
                    Some(a) => vec![robot_line(&a)],
                    None => vec![format!("no hint needed ({})", self.need_line())],
                },
            },
        }
    }

    fn plan(&self, cfs: &[carebot_core::planner::Counterfactual]) -> Vec<String> {
        let plan = match self.session.plan() {
            Ok(p) => p,
            Err(e) => return self.error(e),
        };
        let AlternativePlanSet { entries } = self.session.alternatives(cfs);
        match self.format {
            Format::Text => {
                let mut lines = vec![plan.plan_form()];
                for entry in entries {
                    match entry.result {
                        Ok(alt) => lines.push(alt.alternative_form()),
                        Err(e) => lines.push(format!("error: {e}")),
                    }
                }
                lines
            }
            Format::Json => {
                let alts: Vec<Value> = entries
                    .iter()
                    .map(|entry| match &entry.result {
                        Ok(alt) => json!({"counterfactual": entry.counterfactual, "plan": alt.alternative_form()}),
                        Err(e) => json!({"counterfactual": entry.counterfactual, "error": e.to_string()}),
                    })
                    .collect();
                vec![json!({"plan": plan.plan_form(), "steps": plan.steps, "alternatives": alts}).to_string()]
            }
        }
    }

    fn why(&mut self, question: &str) -> Vec<String> {
        let x = match self.session.why(question, &self.explainer) {
            Ok(x) => x,
            Err(e) => return self.error(e),
        };
        let join = |ts: &[carebot_core::Term]| ts.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        match self.format {
            Format::Text => vec![
                format!("query: {}", x.query),
                format!("justification: {}", join(&x.justification)),
                format!("chain: {}", join(&x.chain)),
                format!("robot: {}", x.text),
            ],
            Format::Json => vec![json!({
                "query": x.query,
                "justification": x.justification,
                "chain": x.chain,
                "text": x.text,
            })
            .to_string()],
        }
    }

    fn pref(&mut self, p: carebot_core::scenario::Preference) -> Vec<String> {
        match self.session.set_preference(p) {
            Err(e) => self.error(e),
            Ok(u) => match self.format {
                Format::Text => vec![format!("preference: {}", u.summary), u.plan.plan_form()],
                Format::Json => vec![json!({
                    "state_id": self.session.state.id,
                    "summary": u.summary,
                    "plan": u.plan.plan_form(),
                })
                .to_string()],
            },
        }
    }

    fn state(&self) -> Vec<String> {
        let state = &self.session.state;
        let diff = match self.session.diff() {
            Ok(d) => d,
            Err(e) => return self.error(e),
        };
        match self.format {
            Format::Json => vec![json!({
                "state_id": state.id,
                "grid": state.grid,
                "diff": diff,
                "need": self.session.need.level,
            })
            .to_string()],
            Format::Text => {
                let mut lines = vec![format!("state: {}", state.id)];
                for med in &state.medications {
                    let cells: Vec<String> = state
                        .grid
                        .cells_of(&med.name)
                        .into_iter()
                        .map(|(c, n)| match n {
                            1 => format!("{} {}", c.day, c.slot),
                            n => format!("{} {} x{n}", c.day, c.slot),
                        })
                        .collect();
                    let cells = if cells.is_empty() { "(none)".to_string() } else { cells.join(", ") };
                    lines.push(format!("  {}: {cells}", med.name));
                }
                lines.push(format!("diff: {}", diff_summary(&diff)));
                lines.push(self.need_line());
                lines
            }
        }
    }

    fn trace(&self) -> Vec<String> {
        let lines = self.session.trace();
        match self.format {
            Format::Json => vec![json!({"trace": lines}).to_string()],
            Format::Text if lines.is_empty() => vec!["no explanation yet".to_string()],
            Format::Text => lines,
        }
    }
}
