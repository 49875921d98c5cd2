//! Random opponents against the engine through the HTTP API.

use std::net::SocketAddr;
use std::sync::Arc;

use chomp_core::{EngineConfig, Outcome};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::session::{CreateResponse, EnginePolicy, MoveResponse, SessionStore, Status};

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub spec: String,
    pub games: usize,
    pub seed: u64,
    pub policy: EnginePolicy,
}

/// The part of a `/nim` answer the fuzzer needs.
#[derive(Debug, Deserialize)]
struct Verdict {
    outcome: Outcome,
}

#[derive(Debug, Clone, Serialize)]
pub struct FuzzReport {
    pub spec: String,
    pub games: usize,
    /// Whether the engine moved first (an A-position) or second (a B-position).
    pub engine_first: bool,
    pub engine_wins: usize,
    pub engine_losses: usize,
    pub non_perfect_replies: usize,
    pub moves: usize,
}

impl FuzzReport {
    pub fn sound(&self) -> bool {
        self.engine_losses == 0 && self.engine_wins == self.games
    }
}

async fn check(resp: reqwest::Response) -> CliResult<reqwest::Response> {
    if resp.status().is_success() {
        return Ok(resp);
    }
    let status = resp.status();
    Err(CliError::Http(format!("{status}: {}", resp.text().await.unwrap_or_default())))
}

/// Plays `cfg.games` games against the server at `base` with uniformly random human
/// moves. The engine takes the winning seat according to the server's `/nim`.
pub async fn fuzz(base: &str, cfg: &FuzzConfig) -> CliResult<FuzzReport> {
    let client = reqwest::Client::new();
    let nim: Verdict = check(client.get(format!("{base}/nim")).query(&[("spec", cfg.spec.as_str())]).send().await?)
        .await?
        .json()
        .await?;
    let engine_first = match nim.outcome {
        Outcome::A => true,
        Outcome::B => false,
        Outcome::Unknown => return Err(CliError::Usage(format!("{}: no known winning seat", cfg.spec))),
    };
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut report = FuzzReport {
        spec: cfg.spec.clone(),
        games: cfg.games,
        engine_first,
        engine_wins: 0,
        engine_losses: 0,
        non_perfect_replies: 0,
        moves: 0,
    };
    for _ in 0..cfg.games {
        let body = json!({ "spec": cfg.spec, "human_first": !engine_first, "engine_policy": cfg.policy });
        let created: CreateResponse =
            check(client.post(format!("{base}/sessions")).json(&body).send().await?).await?.json().await?;
        let id = created.session_id;
        let (mut faces, mut status) = (created.state.faces, created.status);
        report.non_perfect_replies += created.engine_move.iter().filter(|r| !r.perfect).count();
        while !status.is_terminal() {
            let face = faces.choose(&mut rng).expect("ongoing game has faces").clone();
            let url = format!("{base}/sessions/{id}/moves");
            let resp: MoveResponse =
                check(client.post(url).json(&json!({ "face": face })).send().await?).await?.json().await?;
            report.moves += 1;
            report.non_perfect_replies += resp.engine_reply.iter().filter(|r| !r.perfect).count();
            faces = resp.state.faces;
            status = resp.status;
        }
        match status {
            Status::HumanLost => report.engine_wins += 1,
            Status::EngineLost => report.engine_losses += 1,
            Status::Ongoing => unreachable!(),
        }
        check(client.delete(format!("{base}/sessions/{id}")).send().await?).await?;
    }
    Ok(report)
}

/// Starts a server on an ephemeral local port and fuzzes it over TCP.
pub async fn fuzz_local(cfgs: &[FuzzConfig], engine: EngineConfig) -> CliResult<Vec<FuzzReport>> {
    let listener = tokio::net::TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], 0)))
        .await
        .map_err(|e| CliError::Http(e.to_string()))?;
    let addr = listener.local_addr().map_err(|e| CliError::Http(e.to_string()))?;
    let app = crate::service::router(Arc::new(SessionStore::new(engine)));
    let server = tokio::spawn(async move { axum::serve(listener, app).await });
    let base = format!("http://{addr}");
    let mut out = Vec::new();
    for cfg in cfgs {
        out.push(fuzz(&base, cfg).await?);
    }
    server.abort();
    Ok(out)
}
