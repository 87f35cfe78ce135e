use std::io::{self, IsTerminal};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use carebot_cli::script::resolve_scenario;
use carebot_cli::{run_batch, run_record, run_repl, Format};
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "carebot", version, about = "Medication sorting assistant")]
struct Args {
    #[command(subcommand)]
    mode: Mode,
}

#[derive(Subcommand, Debug)]
enum Mode {
    /// Interactive session.
    Repl {
        /// Scenario file, or the name of a bundled scenario.
        #[arg(long, default_value = "state8")]
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a golden script and diff its output.
    Batch {
        script: PathBuf,
        /// Overrides the script's `@scenario` line.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a script and print it back with the actual output filled in.
    Record {
        script: PathBuf,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut stdout = io::stdout().lock();
    match args.mode {
        Mode::Repl { scenario, format } => {
            let state = match resolve_scenario(&scenario.to_string_lossy(), Path::new(".")) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("carebot: {e}");
                    return ExitCode::from(2);
                }
            };
            let stdin = io::stdin();
            let prompt = stdin.is_terminal().then_some("carebot> ");
            match run_repl(state, format, stdin.lock(), &mut stdout, prompt) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("carebot: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Mode::Batch { script, scenario, format } => {
            ExitCode::from(run_batch(&script, scenario.as_deref(), format, &mut stdout) as u8)
        }
        Mode::Record { script, scenario, format } => {
            ExitCode::from(run_record(&script, scenario.as_deref(), format, &mut stdout) as u8)
        }
    }
}
