use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use carebot_core::bundle;
use carebot_core::scenario::{load_scenario, parse_scenario, TaskState};
use thiserror::Error;

use crate::command::{Command, CommandError};
use crate::engine::{Engine, Format};

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("scenario `{name}`: {message}")]
    Scenario { name: String, message: String },
    #[error("no scenario given; pass --scenario or start the script with `@scenario <path>`")]
    NoScenario,
}

/// One `> command` and the lines it is expected to print.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub line: usize,
    pub source: String,
    pub command: Command,
    pub expected: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Script {
    pub scenario: Option<String>,
    pub steps: Vec<Step>,
}

impl Script {
    /// Parses every command up front; nothing runs if any line is bad.
    pub fn parse(text: &str) -> Result<Script, ScriptError> {
        let mut script = Script::default();
        let mut open = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| ScriptError::Parse { line, message };
            let trimmed = raw.trim_end();
            if trimmed.trim().is_empty() {
                open = false;
                continue;
            }
            if trimmed.starts_with('#') {
                continue;
            }
            if let Some(cmd) = trimmed.strip_prefix('>') {
                let cmd = cmd.trim();
                let command = Command::parse(cmd).map_err(|e| match e {
                    CommandError::Empty => err("`>` with no command".into()),
                    e => err(e.to_string()),
                })?;
                script.steps.push(Step {
                    line,
                    source: cmd.to_string(),
                    command,
                    expected: Vec::new(),
                });
                open = true;
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("@scenario") {
                if !script.steps.is_empty() || script.scenario.is_some() {
                    return Err(err("`@scenario` must come once, before the first command".into()));
                }
                let name = rest.trim();
                if name.is_empty() {
                    return Err(err("`@scenario` needs a path".into()));
                }
                script.scenario = Some(name.to_string());
                continue;
            }
            match script.steps.last_mut() {
                Some(step) if open => step.expected.push(trimmed.to_string()),
                _ => return Err(err(format!("expected `> command`, found `{trimmed}`"))),
            }
        }
        Ok(script)
    }

    pub fn load(path: &Path) -> Result<Script, ScriptError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScriptError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Script::parse(&text)
    }
}

/// A scenario file relative to `base`, or else a bundled scenario name.
pub fn resolve_scenario(name: &str, base: &Path) -> Result<TaskState, ScriptError> {
    let bad = |message: String| ScriptError::Scenario {
        name: name.to_string(),
        message,
    };
    let path = base.join(name);
    if path.is_file() {
        return load_scenario(&path).map_err(|e| bad(e.to_string()));
    }
    match bundle::scenario(name) {
        Some(text) => parse_scenario(text).map_err(|e| bad(e.to_string())),
        None => Err(bad("no such file or bundled scenario".into())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Passed { steps: usize },
    Mismatch { step: Step, actual: Vec<String> },
}

pub fn run_script(script: &Script, state: TaskState, format: Format) -> Result<Outcome, ScriptError> {
    let mut engine = Engine::new(state, format).map_err(|e| ScriptError::Scenario {
        name: script.scenario.clone().unwrap_or_default(),
        message: e.to_string(),
    })?;
    let mut ran = 0;
    for step in &script.steps {
        let reply = engine.execute(&step.command);
        if reply.lines != step.expected {
            return Ok(Outcome::Mismatch {
                step: step.clone(),
                actual: reply.lines,
            });
        }
        ran += 1;
        if reply.quit {
            break;
        }
    }
    Ok(Outcome::Passed { steps: ran })
}

/// Rewrites the script with the output each command actually prints.
pub fn record_script(script: &Script, state: TaskState, format: Format) -> Result<String, ScriptError> {
    let mut engine = Engine::new(state, format).map_err(|e| ScriptError::Scenario {
        name: script.scenario.clone().unwrap_or_default(),
        message: e.to_string(),
    })?;
    let mut out = String::new();
    if let Some(s) = &script.scenario {
        out.push_str(&format!("@scenario {s}\n\n"));
    }
    for step in &script.steps {
        let reply = engine.execute(&step.command);
        out.push_str(&format!("> {}\n", step.source));
        for l in &reply.lines {
            out.push_str(l);
            out.push('\n');
        }
        out.push('\n');
        if reply.quit {
            break;
        }
    }
    Ok(out)
}

pub fn mismatch_report(step: &Step, actual: &[String]) -> String {
    let mut out = format!("mismatch at line {}: > {}\n--- expected\n+++ actual\n", step.line, step.source);
    for i in 0..step.expected.len().max(actual.len()) {
        match (step.expected.get(i), actual.get(i)) {
            (Some(e), Some(a)) if e == a => out.push_str(&format!("  {e}\n")),
            (e, a) => {
                if let Some(e) = e {
                    out.push_str(&format!("-{e}\n"));
                }
                if let Some(a) = a {
                    out.push_str(&format!("+{a}\n"));
                }
            }
        }
    }
    out
}

fn scenario_for(script: &Script, script_path: &Path, scenario: Option<&Path>) -> Result<TaskState, ScriptError> {
    if let Some(p) = scenario {
        return resolve_scenario(&p.to_string_lossy(), Path::new("."));
    }
    let base = script_path.parent().unwrap_or(Path::new("."));
    match &script.scenario {
        Some(name) => resolve_scenario(name, base),
        None => Err(ScriptError::NoScenario),
    }
}

/// Runs a script file and returns the process exit code: 0 when every block
/// matches, 1 on the first mismatch, 2 when the script or scenario is bad.
pub fn run_batch(script_path: &Path, scenario: Option<&Path>, format: Format, out: &mut impl Write) -> i32 {
    let result = Script::load(script_path).and_then(|script| {
        if script.steps.is_empty() {
            return Ok(Outcome::Passed { steps: 0 });
        }
        let state = scenario_for(&script, script_path, scenario)?;
        run_script(&script, state, format)
    });
    match result {
        Ok(Outcome::Passed { steps }) => {
            let _ = writeln!(out, "ok: {steps} commands matched");
            0
        }
        Ok(Outcome::Mismatch { step, actual }) => {
            let _ = write!(out, "{}", mismatch_report(&step, &actual));
            1
        }
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            2
        }
    }
}

/// Like [`run_batch`] but prints the re-recorded script instead of diffing.
pub fn run_record(script_path: &Path, scenario: Option<&Path>, format: Format, out: &mut impl Write) -> i32 {
    let result = Script::load(script_path).and_then(|script| {
        let state = scenario_for(&script, script_path, scenario)?;
        record_script(&script, state, format)
    });
    match result {
        Ok(text) => {
            let _ = write!(out, "{text}");
            0
        }
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            2
        }
    }
}

/// Reads commands line by line until `quit` or end of input.
pub fn run_repl(
    state: TaskState,
    format: Format,
    input: impl BufRead,
    out: &mut impl Write,
    prompt: Option<&str>,
) -> io::Result<()> {
    let mut engine = Engine::new(state, format).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    let show_prompt = |out: &mut dyn Write| -> io::Result<()> {
        if let Some(p) = prompt {
            write!(out, "{p}")?;
            out.flush()?;
        }
        Ok(())
    };
    show_prompt(out)?;
    for line in input.lines() {
        let reply = engine.execute_line(&line?);
        for l in &reply.lines {
            writeln!(out, "{l}")?;
        }
        if reply.quit {
            break;
        }
        show_prompt(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_and_directives() {
        let s = Script::parse("# golden\n@scenario state8\n\n> hint\nno hint\n\n> state\n> quit\n").unwrap();
        assert_eq!(s.scenario.as_deref(), Some("state8"));
        assert_eq!(s.steps.len(), 3);
        assert_eq!(s.steps[0].expected, vec!["no hint"]);
        assert!(s.steps[1].expected.is_empty());
        assert_eq!(s.steps[2].line, 8);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let cases = ["> dance\n", "stray\n", "> hint\n\nstray\n", "> hint\n@scenario x\n", ">\n", "@scenario\n"];
        for text in cases {
            assert!(matches!(Script::parse(text), Err(ScriptError::Parse { .. })), "{text:?}");
        }
        match Script::parse("> hint\n\n> fly\n") {
            Err(ScriptError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn report_marks_differences() {
        let step = Script::parse("> hint\na\nb\n").unwrap().steps.remove(0);
        let r = mismatch_report(&step, &["a".into(), "c".into(), "d".into()]);
        assert_eq!(r, "mismatch at line 1: > hint\n--- expected\n+++ actual\n  a\n-b\n+c\n+d\n");
    }
}
