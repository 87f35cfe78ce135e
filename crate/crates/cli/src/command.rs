use carebot_core::planner::Counterfactual;
use carebot_core::scenario::{Day, Preference, Slot, UserAction};
use thiserror::Error;

pub const USAGE: &str = "\
commands:
  place <med> <day> <slot>    put a pill in a cell
  remove <med> <day> <slot>   take a pill out of a cell
  hesitate <seconds>          report a pause
  say <text>                  say something to the robot
  hint                        ask for the hint the need level calls for
  plan [cf...]                show the plan, plus one alternative per `<distance>` or `<med>:<distance>`
  why [text]                  ask why (defaults to the last hint)
  pref <s-expression>         state a preference, e.g. (prefers user (medicationBeforeActivityBy Levodopa 0))
  state                       show the grid and need level
  trace                       show the fact trace of the last explanation
  help                        show this text
  quit                        leave";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CommandError {
    #[error("empty command")]
    Empty,
    #[error("unknown command `{0}`")]
    Unknown(String),
    #[error("usage: {0}")]
    Usage(&'static str),
    #[error("{0}")]
    Argument(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Act(UserAction),
    Hint,
    Plan(Vec<Counterfactual>),
    Why(String),
    Pref(Preference),
    State,
    Trace,
    Help,
    Quit,
}

fn cell(args: &[&str], usage: &'static str) -> Result<(String, Day, Slot), CommandError> {
    let [med, day, slot] = args else {
        return Err(CommandError::Usage(usage));
    };
    let day = Day::parse(day).map_err(|e| CommandError::Argument(e.to_string()))?;
    let slot = Slot::parse(slot).map_err(|e| CommandError::Argument(e.to_string()))?;
    Ok((med.to_string(), day, slot))
}

pub fn parse_counterfactual(token: &str) -> Result<Counterfactual, CommandError> {
    let (med, d) = match token.split_once(':') {
        Some((m, d)) => (Some(m.to_string()), d),
        None => (None, token),
    };
    let distance = d
        .parse::<i64>()
        .ok()
        .filter(|d| *d >= 0)
        .ok_or_else(|| CommandError::Argument(format!("`{token}` is not a distance or <medication>:<distance>")))?;
    Ok(Counterfactual { medication: med, distance })
}

impl Command {
    pub fn parse(line: &str) -> Result<Command, CommandError> {
        let line = line.trim();
        let (word, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let args: Vec<&str> = rest.split_whitespace().collect();
        match word {
            "" => Err(CommandError::Empty),
            "place" => {
                let (med, day, slot) = cell(&args, "place <med> <day> <slot>")?;
                Ok(Command::Act(UserAction::PlacePill { med, day, slot }))
            }
            "remove" => {
                let (med, day, slot) = cell(&args, "remove <med> <day> <slot>")?;
                Ok(Command::Act(UserAction::RemovePill { med, day, slot }))
            }
            "hesitate" => {
                let [s] = args[..] else {
                    return Err(CommandError::Usage("hesitate <seconds>"));
                };
                let seconds = s
                    .parse::<f64>()
                    .ok()
                    .filter(|s| s.is_finite() && *s >= 0.0)
                    .ok_or_else(|| CommandError::Argument(format!("`{s}` is not a number of seconds")))?;
                Ok(Command::Act(UserAction::Hesitate { seconds }))
            }
            "say" if rest.is_empty() => Err(CommandError::Usage("say <text>")),
            "say" => Ok(Command::Act(UserAction::Utterance { text: rest.to_string() })),
            "hint" => Ok(Command::Hint),
            "plan" => args
                .iter()
                .map(|t| parse_counterfactual(t))
                .collect::<Result<_, _>>()
                .map(Command::Plan),
            "why" => Ok(Command::Why(if rest.is_empty() { "Why?".to_string() } else { rest.to_string() })),
            "pref" if rest.is_empty() => Err(CommandError::Usage("pref <s-expression>")),
            "pref" => Preference::parse(rest)
                .map(Command::Pref)
                .map_err(|e| CommandError::Argument(e.to_string())),
            "state" => Ok(Command::State),
            "trace" => Ok(Command::Trace),
            "help" | "?" => Ok(Command::Help),
            "quit" | "exit" => Ok(Command::Quit),
            other => Err(CommandError::Unknown(other.to_string())),
        }
    }
}
