//! Text front end for the carebot engine: an interactive REPL and a runner
//! for golden scripts. Both share [`Engine`], so a command prints the same
//! lines however it arrives.

pub mod command;
pub mod engine;
pub mod script;

pub use command::{Command, CommandError, USAGE};
pub use engine::{Engine, Format, Reply};
pub use script::{run_batch, run_record, run_repl, run_script, Outcome, Script, ScriptError};

/// The bundled golden script.
pub const GOLDEN_STATE8_SCRIPT: &str = include_str!("../scripts/golden_state8.script");
