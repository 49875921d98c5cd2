use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use chomp_cli::fuzz::{fuzz, fuzz_local, FuzzConfig};
use chomp_cli::moves::{best_move, describe};
use chomp_cli::nim::{nim, Method};
use chomp_cli::session::EnginePolicy;
use chomp_cli::verify::{verify, Bounds, Family};
use chomp_cli::{resolve, CliError, CliResult, SessionStore};
use chomp_core::EngineConfig;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chomp", version, about = "Perfect play and closed-form Nim values for chomp on graphs and complexes")]
struct Cli {
    /// Node budget per engine call (overrides CHOMP_NODE_BUDGET).
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Nim-value of a family spec or a complex JSON file.
    Nim {
        instance: String,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
        #[arg(long)]
        json: bool,
    },
    /// Compare closed forms with the engine over a parameter range.
    Verify {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value_t = 5)]
        n_max: u32,
        #[arg(long, default_value_t = 7)]
        sum_max: u32,
        #[arg(long, default_value_t = 2)]
        attachments: u32,
        #[arg(long, default_value_t = 4)]
        s_max: u32,
        #[arg(long, default_value_t = 40)]
        face_max: usize,
        #[arg(long)]
        json: bool,
    },
    /// A winning move, or "position is lost".
    BestMove {
        instance: String,
        /// Print faces with vertex labels instead of ids.
        #[arg(long)]
        as_labels: bool,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Persist sessions as JSON lines and restore them on start.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Random opponents against the engine's winning seat, over HTTP.
    Fuzz {
        spec: String,
        #[arg(long, default_value_t = 100)]
        games: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "perfect")]
        engine_policy: EnginePolicy,
        /// A running server; without it a local one is started.
        #[arg(long)]
        url: Option<String>,
    },
}

fn runtime() -> CliResult<tokio::runtime::Runtime> {
    tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(|e| CliError::Usage(e.to_string()))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data")
}

fn run(cli: Cli) -> CliResult<()> {
    let mut config = EngineConfig::from_env();
    if let Some(b) = cli.budget {
        config.node_budget = b;
    }
    match cli.command {
        Command::Nim { instance, method, json } => {
            let report = nim(&resolve(&instance)?, method, &config)?;
            println!("{}", if json { to_json(&report) } else { report.to_string() });
        }
        Command::Verify { family, n_max, sum_max, attachments, s_max, face_max, json } => {
            let bounds = Bounds { n_max, sum_max, attachments, s_max, face_max };
            let report = verify(family, &bounds, &config)?;
            println!("{}", if json { to_json(&report) } else { report.to_string() });
            report.check()?;
        }
        Command::BestMove { instance, as_labels } => {
            let instance = resolve(&instance)?;
            let mv = best_move(&instance, &config)?;
            println!("{}", describe(&instance, mv.as_ref(), as_labels)?);
        }
        Command::Serve { port, host, snapshot } => {
            let store = match snapshot {
                Some(path) => SessionStore::with_snapshot(config, &path).map_err(|e| CliError::Usage(e.to_string()))?,
                None => SessionStore::new(config),
            };
            let addr = SocketAddr::new(host, port);
            eprintln!("listening on http://{addr}");
            runtime()?
                .block_on(chomp_cli::service::serve(addr, Arc::new(store)))
                .map_err(|e| CliError::Http(e.to_string()))?;
        }
        Command::Fuzz { spec, games, seed, engine_policy, url } => {
            let cfg = FuzzConfig { spec, games, seed, policy: engine_policy };
            let rt = runtime()?;
            let report = match url {
                Some(base) => rt.block_on(fuzz(base.trim_end_matches('/'), &cfg))?,
                None => rt.block_on(fuzz_local(std::slice::from_ref(&cfg), config))?.remove(0),
            };
            println!("{}", to_json(&report));
            if !report.sound() {
                return Err(CliError::EngineLost(report.engine_losses));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
