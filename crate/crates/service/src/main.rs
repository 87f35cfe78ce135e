use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use carebot_service::{app, Clock, Config};
use clap::Parser;
use tracing_subscriber::EnvFilter;

#[derive(Parser, Debug)]
#[command(name = "carebot-service", version, about = "Serve carebot sessions over HTTP")]
struct Args {
    /// Address to listen on.
    #[arg(long, env = "CAREBOT_LISTEN", default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Directory for session snapshots. Sessions stay in memory when unset.
    #[arg(long, env = "CAREBOT_STORAGE_DIR")]
    storage_dir: Option<PathBuf>,
    /// Directory searched for named scenarios before the bundled ones.
    #[arg(long, env = "CAREBOT_SCENARIO_DIR")]
    scenario_dir: Option<PathBuf>,
    /// Report this fixed `created_at` instead of the wall clock.
    #[arg(long, env = "CAREBOT_FIXED_CLOCK")]
    fixed_clock: Option<u64>,
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .init();
    let args = Args::parse();
    let config = Config {
        storage_dir: args.storage_dir,
        scenario_dir: args.scenario_dir,
        clock: args.fixed_clock.map_or(Clock::System, Clock::Fixed),
        ..Config::default()
    };
    let router = match app(config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("carebot-service: {}", e.message);
            return ExitCode::FAILURE;
        }
    };
    let listener = match tokio::net::TcpListener::bind(args.listen).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("carebot-service: cannot listen on {}: {e}", args.listen);
            return ExitCode::FAILURE;
        }
    };
    tracing::info!(addr = %args.listen, "listening");
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    if let Err(e) = axum::serve(listener, router).with_graceful_shutdown(shutdown).await {
        eprintln!("carebot-service: {e}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
