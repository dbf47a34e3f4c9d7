//! The `nftrig` command line.
//!
//! | command | exit codes |
//! |---|---|
//! | `serve` | 0 after a clean shutdown, 1 on config or lock failure |
//! | `replay` | 0 verified, 1 snapshot hash mismatch, 2 corrupt log |
//! | `inspect` | 0, 1 for an unknown `--account`, 2 corrupt log |
//! | `scenario FILE` | 0 all steps matched, 1 a step mismatched, 2 unreadable scenario |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::IsTerminal;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::api::{ApiOptions, DirSink, Service};
use crate::card::Rarity;
use crate::config::EngineConfig;
use crate::contracts::ListingStatus;
use crate::engine::{Engine, TxRequest};
use crate::ledger::{snapshot_hash, AccountId, Genesis, LedgerState};
use crate::store::{self, StateDir, StoreError};

#[derive(Debug, Parser)]
#[command(name = "nftrig", version, about = "Trig-card engine: serve, replay, inspect, scenario")]
pub struct Cli {
    /// Engine config (JSON). Defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// State directory; overrides the config's `state_dir`.
    #[arg(long, global = true)]
    pub state_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the HTTP API over a state directory.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 1000)]
        snapshot_every: u64,
    },
    /// Replay the log and check it against every stored snapshot hash.
    Replay,
    /// Summarize accounts, cards and listings.
    Inspect {
        #[arg(long)]
        account: Option<String>,
    },
    /// Run a scripted list of requests against a fresh in-memory engine.
    Scenario { file: PathBuf },
}

/// Expected result of one scenario step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case", deny_unknown_fields)]
pub enum Expect {
    Accept,
    Reject { code: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioStep {
    pub request: TxRequest,
    pub expect: Expect,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub steps: Vec<ScenarioStep>,
}

/// Where a scenario stopped matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub index: usize,
    pub expected: Expect,
    /// `None` when the step was accepted.
    pub got: Option<String>,
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let expected = match &self.expected {
            Expect::Accept => "accept".to_owned(),
            Expect::Reject { code } => format!("reject {code}"),
        };
        let got = match &self.got {
            None => "accept".to_owned(),
            Some(code) => format!("reject {code}"),
        };
        write!(f, "step {}: expected {expected}, got {got}", self.index)
    }
}

/// Applies every step in order, stopping at the first mismatch.
pub fn run_scenario(engine: &mut Engine, scenario: &Scenario) -> Result<(), Mismatch> {
    for (index, step) in scenario.steps.iter().enumerate() {
        let got = engine
            .submit(step.request.clone())
            .err()
            .map(|e| e.machine_code().to_owned());
        let ok = match (&step.expect, &got) {
            (Expect::Accept, None) => true,
            (Expect::Reject { code }, Some(actual)) => code == actual,
            _ => false,
        };
        if !ok {
            return Err(Mismatch {
                index,
                expected: step.expect.clone(),
                got,
            });
        }
    }
    Ok(())
}

/// Result of replaying a state directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayReport {
    /// `events` applied; every stored snapshot hash matched.
    Ok { events: u64, hash: String, snapshots_checked: usize },
    Mismatch { seq: u64, stored: String, replayed: String },
}

/// Replays `dir`'s log from genesis, comparing against each stored
/// snapshot hash as the replay passes its seq.
pub fn replay_dir(dir: &Path, genesis: &Genesis) -> Result<ReplayReport, StoreError> {
    let log = store::read_log(dir)?;
    let snapshots = if dir.exists() { store::list_snapshots(dir)? } else { Vec::new() };
    let mut state = LedgerState::genesis(genesis);
    let mut checked = 0;
    for event in &log {
        state.apply(event).map_err(|e| StoreError::CorruptLog {
            seq: event.seq,
            reason: e.to_string(),
        })?;
        if snapshots.binary_search(&event.seq).is_ok() {
            let stored = store::read_snapshot_hash(dir, event.seq)?;
            let replayed = snapshot_hash(&state).to_hex();
            if stored != replayed {
                return Ok(ReplayReport::Mismatch {
                    seq: event.seq,
                    stored,
                    replayed,
                });
            }
            checked += 1;
        }
    }
    // a snapshot past the end of the log means events went missing
    if let Some(&last) = snapshots.last() {
        if last >= log.len() as u64 {
            return Err(StoreError::CorruptLog {
                seq: log.len() as u64,
                reason: format!("log ends before snapshot {last}"),
            });
        }
    }
    Ok(ReplayReport::Ok {
        events: state.next_seq(),
        hash: snapshot_hash(&state).to_hex(),
        snapshots_checked: checked,
    })
}

/// The `inspect` report as text.
pub fn inspect_report(state: &LedgerState, account: Option<&AccountId>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "params version {}", state.params().version);
    let accounts: Vec<_> = state
        .accounts()
        .values()
        .filter(|a| account.is_none_or(|id| &a.id == id))
        .collect();
    let _ = writeln!(out, "accounts {}", accounts.len());
    for a in &accounts {
        let cards = state.cards_of(&a.id).count();
        let _ = writeln!(out, "  {} currency={} xp={} cards={cards}", a.id, a.currency, a.xp);
    }

    let mut histogram: BTreeMap<u8, usize> = Rarity::ALL.iter().map(|r| (r.level(), 0)).collect();
    let tokens = state
        .tokens()
        .values()
        .filter(|t| account.is_none_or(|id| t.owner.account() == Some(id)));
    let mut total = 0;
    for t in tokens {
        *histogram.entry(t.rarity.level()).or_default() += 1;
        total += 1;
    }
    let _ = write!(out, "tokens {total}:");
    for r in Rarity::ALL {
        let _ = write!(out, " {r:?}={}", histogram[&r.level()]);
    }
    out.push('\n');

    let active: Vec<_> = state
        .listings()
        .values()
        .filter(|l| l.status == ListingStatus::Active)
        .filter(|l| account.is_none_or(|id| &l.seller == id))
        .collect();
    let _ = writeln!(out, "active listings {}", active.len());
    for l in active {
        let _ = writeln!(
            out,
            "  listing {} token {} seller {} price {}",
            l.listing_id, l.token_id, l.seller, l.price
        );
    }
    out
}

pub fn run() -> ExitCode {
    run_with(Cli::parse())
}

pub fn run_with(cli: Cli) -> ExitCode {
    let config = match &cli.config {
        Some(path) => match EngineConfig::load(path) {
            Ok(c) => c,
            Err(e) => return fail(1, e),
        },
        None => EngineConfig::default(),
    };
    let genesis = match config.genesis() {
        Ok(g) => g,
        Err(e) => return fail(1, e),
    };
    let state_dir = cli.state_dir.clone().unwrap_or_else(|| config.state_dir.clone());

    match cli.command {
        Command::Serve {
            port,
            host,
            snapshot_every,
        } => serve(&config, genesis, &state_dir, &host, port, snapshot_every),
        Command::Replay => match replay_dir(&state_dir, &genesis) {
            Ok(ReplayReport::Ok {
                events,
                hash,
                snapshots_checked,
            }) => {
                println!("OK seq={events} hash={hash} snapshots={snapshots_checked}");
                ExitCode::SUCCESS
            }
            Ok(ReplayReport::Mismatch { seq, stored, replayed }) => {
                println!("MISMATCH seq={seq} stored={stored} replayed={replayed}");
                ExitCode::from(1)
            }
            Err(e @ StoreError::CorruptLog { .. }) => fail(2, format!("CorruptLog: {e}")),
            Err(e) => fail(1, e),
        },
        Command::Inspect { account } => {
            let account = match account.map(AccountId::new).transpose() {
                Ok(a) => a,
                Err(e) => return fail(1, format!("UnknownAccount: {e}")),
            };
            let state = match load_live(&state_dir, &genesis) {
                Ok(s) => s,
                Err(e @ StoreError::CorruptLog { .. }) => return fail(2, format!("CorruptLog: {e}")),
                Err(e) => return fail(1, e),
            };
            if let Some(id) = &account {
                if state.account(id).is_none() {
                    return fail(1, format!("UnknownAccount: {id}"));
                }
            }
            print!("{}", inspect_report(&state, account.as_ref()));
            ExitCode::SUCCESS
        }
        Command::Scenario { file } => {
            let scenario: Scenario = match std::fs::read_to_string(&file)
                .map_err(|e| e.to_string())
                .and_then(|t| serde_json::from_str(&t).map_err(|e| e.to_string()))
            {
                Ok(s) => s,
                Err(e) => return fail(2, format!("{}: {e}", file.display())),
            };
            let bank = match config.question_bank() {
                Ok(b) => b,
                Err(e) => return fail(1, e),
            };
            let mut engine = Engine::new(genesis, bank);
            match run_scenario(&mut engine, &scenario) {
                Ok(()) => {
                    println!("PASS steps={} hash={}", scenario.steps.len(), engine.hash());
                    ExitCode::SUCCESS
                }
                Err(m) => {
                    println!("FAIL {m}");
                    ExitCode::from(1)
                }
            }
        }
    }
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("nftrig: {message}");
    ExitCode::from(code)
}

/// Snapshot plus log tail, fully applied.
fn load_live(dir: &Path, genesis: &Genesis) -> Result<LedgerState, StoreError> {
    let (mut state, tail) = store::load_state(dir, genesis)?;
    for event in &tail {
        state.apply(event).map_err(|e| StoreError::CorruptLog {
            seq: event.seq,
            reason: e.to_string(),
        })?;
    }
    Ok(state)
}

fn serve(config: &EngineConfig, genesis: Genesis, dir: &Path, host: &str, port: u16, snapshot_every: u64) -> ExitCode {
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .with_ansi(std::io::stderr().is_terminal())
        .try_init();

    let state_dir = match StateDir::open(dir) {
        Ok(d) => d,
        Err(e) => return fail(1, e),
    };
    let bank = match config.question_bank() {
        Ok(b) => b,
        Err(e) => return fail(1, e),
    };
    let engine = match store::load_state(dir, &genesis)
        .and_then(|(state, tail)| {
            Engine::resume(genesis, bank, state, tail).map_err(|c| StoreError::CorruptLog {
                seq: c.seq,
                reason: c.reason,
            })
        }) {
        Ok(e) => e,
        Err(e) => return fail(2, e),
    };
    let addr: SocketAddr = match format!("{host}:{port}").parse() {
        Ok(a) => a,
        Err(e) => return fail(1, format!("bad listen address {host}:{port}: {e}")),
    };

    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => return fail(1, e),
    };
    let options = ApiOptions {
        admin_secret: config.admin_secret.clone(),
        ..ApiOptions::default()
    };
    runtime.block_on(async move {
        let service = Service::with_sink(engine, DirSink::new(state_dir, snapshot_every), options);
        let listener = match tokio::net::TcpListener::bind(addr).await {
            Ok(l) => l,
            Err(e) => return fail(1, format!("binding {addr}: {e}")),
        };
        let local = listener.local_addr().map_or(addr, |a| a);
        // tests and scripts read this line for the bound port
        println!("listening on http://{local}");
        tracing::info!(seq = service.engine().state().next_seq(), "serving {}", dir.display());

        let served = axum::serve(listener, service.router())
            .with_graceful_shutdown(shutdown_signal())
            .await;
        if let Err(e) = served {
            tracing::error!("server error: {e}");
        }
        match service.shutdown().await {
            Ok(()) => {
                tracing::info!("final snapshot written");
                ExitCode::SUCCESS
            }
            Err(e) => fail(1, format!("final snapshot: {e}")),
        }
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}
