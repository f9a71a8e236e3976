//! `sue` command line: serve, replay, validate, check, dump.

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::{Arc, Mutex};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use sue_core::model::BeliefThresholds;
use sue_core::rules::{parse_rules, RuleSet};

use crate::hub::Hub;
use crate::protocol::{Mode, Outbox};
use crate::replay::{replay, Pacing, ReplayReport};
use crate::scenario::{LoadError, Scenario};
use crate::server::{now_ms, router, spawn_ticker, AppState};
use crate::service::{Service, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "sue", version, about = "Situational understanding engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Live mode: accept producers on /ingest and consoles on /console.
    Serve(ServeArgs),
    /// Replay a scenario file through the engine.
    Replay(ReplayArgs),
    /// Check a scenario file and report diagnostics.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Check a rule file and report diagnostics.
    Check {
        #[arg(long)]
        rules: PathBuf,
    },
    /// Replay a scenario as fast as possible and write analytics as JSON.
    Dump(DumpArgs),
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    /// Belief thresholds as strong,medium,weak.
    #[arg(long, value_parser = parse_thresholds, default_value = "0.8,0.5,0.2")]
    pub thresholds: BeliefThresholds,
    #[arg(long, default_value_t = 1000)]
    pub tick_ms: i64,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub rules: PathBuf,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = crate::hub::DEFAULT_QUEUE_CAPACITY)]
    pub queue: usize,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub rules: PathBuf,
    #[arg(long)]
    pub scenario: PathBuf,
    /// Virtual milliseconds per wall-clock millisecond.
    #[arg(long, default_value_t = 1.0, conflicts_with = "fast")]
    pub speed: f64,
    /// Replay as fast as possible.
    #[arg(long)]
    pub fast: bool,
    /// Serve /console on this port instead of printing envelopes.
    #[arg(long)]
    pub port: Option<u16>,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// With --port, hold the replay until a console connects.
    #[arg(long, requires = "port")]
    pub wait_for_console: bool,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Without rules only simple events are summarised.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub bucket_ms: i64,
    #[command(flatten)]
    pub engine: EngineArgs,
}

pub fn parse_thresholds(s: &str) -> Result<BeliefThresholds, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    let [strong, medium, weak] = parts[..] else {
        return Err("expected three values: strong,medium,weak".into());
    };
    BeliefThresholds::new(strong, medium, weak).map_err(|e| e.to_string())
}

pub fn load_rules(path: &Path) -> anyhow::Result<RuleSet> {
    let source = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_rules(&source).map_err(|diags| {
        let lines: Vec<String> = diags.iter().map(|d| format!("{}:{d}", path.display())).collect();
        anyhow::anyhow!(lines.join("\n"))
    })
}

fn load_scenario(path: &Path) -> anyhow::Result<Scenario> {
    Scenario::load(path).map_err(|e| match e {
        LoadError::Invalid(diags) => {
            let lines: Vec<String> = diags.iter().map(|d| format!("{}: {d}", path.display())).collect();
            anyhow::anyhow!(lines.join("\n"))
        }
        other => other.into(),
    })
}

pub async fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Serve(args) => serve(args).await,
        Command::Replay(args) => replay_cmd(args).await,
        Command::Validate { scenario } => match Scenario::load(&scenario) {
            Ok(s) => {
                println!("{}: ok, {} entries", scenario.display(), s.entries.len());
                Ok(ExitCode::SUCCESS)
            }
            Err(LoadError::Invalid(diags)) => {
                for d in diags {
                    eprintln!("{}: {d}", scenario.display());
                }
                Ok(ExitCode::FAILURE)
            }
            Err(e) => Err(e.into()),
        },
        Command::Check { rules } => match load_rules(&rules) {
            Ok(r) => {
                println!("{}: ok, {} fluents, {} rules", rules.display(), r.fluents.len(), r.rules.len());
                Ok(ExitCode::SUCCESS)
            }
            Err(e) => {
                eprintln!("{e}");
                Ok(ExitCode::FAILURE)
            }
        },
        Command::Dump(args) => dump(args).await,
    }
}

async fn bind(host: &str, port: u16) -> anyhow::Result<tokio::net::TcpListener> {
    let addr: SocketAddr = format!("{host}:{port}").parse().with_context(|| format!("bad address {host}:{port}"))?;
    let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("cannot bind {addr}"))?;
    tracing::info!(%addr, "listening");
    Ok(listener)
}

async fn shutdown_signal() {
    let _ = tokio::signal::ctrl_c().await;
}

async fn serve(args: ServeArgs) -> anyhow::Result<ExitCode> {
    if args.queue == 0 {
        bail!("--queue must be positive");
    }
    let rules = load_rules(&args.rules)?;
    let tick = args.engine.tick_ms;
    let config = ServiceConfig {
        mode: Mode::Live,
        epoch_ms: now_ms().div_euclid(tick.max(1)) * tick.max(1),
        tick_ms: tick,
        thresholds: args.engine.thresholds,
        speed: None,
    };
    let service = Service::new(rules, config, Arc::new(Hub::new(args.queue)))?;
    let state = AppState::new(service);
    let listener = bind(&args.host, args.port).await?;
    let ticker = spawn_ticker(Arc::clone(&state.service), tick);
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown_signal()).await?;
    ticker.abort();
    Ok(ExitCode::SUCCESS)
}

fn replay_service(rules: RuleSet, scenario: &Scenario, engine: &EngineArgs, pacing: Pacing) -> anyhow::Result<Service> {
    let config = ServiceConfig {
        mode: Mode::Replay,
        epoch_ms: scenario.epoch_ms,
        tick_ms: engine.tick_ms,
        thresholds: engine.thresholds,
        speed: pacing.speed(),
    };
    Service::new(rules, config, Arc::new(Hub::default()))
}

fn report_rejections(report: &ReplayReport) {
    for (line, e) in &report.rejected {
        eprintln!("line {line}: {}", e.message);
    }
}

async fn replay_cmd(args: ReplayArgs) -> anyhow::Result<ExitCode> {
    if !(args.speed > 0.0 && args.speed.is_finite()) {
        bail!("--speed must be a positive number");
    }
    let pacing = if args.fast { Pacing::Fast } else { Pacing::Speed(args.speed) };
    let rules = load_rules(&args.rules)?;
    let scenario = load_scenario(&args.scenario)?;
    let service = replay_service(rules, &scenario, &args.engine, pacing)?;

    let Some(port) = args.port else {
        let mut sub = service.hub().subscribe_unbounded();
        let service = Mutex::new(service);
        let printer = tokio::spawn(async move {
            let mut outbox = Outbox::default();
            let mut stdout = std::io::stdout();
            while let Some(out) = sub.rx.recv().await {
                if writeln!(stdout, "{}", out.stamp(&mut outbox)).is_err() {
                    break;
                }
            }
        });
        let report = replay(&scenario, pacing, &service).await;
        drop(service);
        printer.await?;
        report_rejections(&report);
        return Ok(ExitCode::SUCCESS);
    };

    let state = AppState::new(service);
    let listener = bind(&args.host, port).await?;
    let app = router(state.clone());
    let server = tokio::spawn(async move { axum::serve(listener, app).with_graceful_shutdown(shutdown_signal()).await });
    if args.wait_for_console {
        while state.hub.subscriber_count() == 0 {
            tokio::time::sleep(std::time::Duration::from_millis(50)).await;
        }
    }
    let report = replay(&scenario, pacing, &state.service).await;
    report_rejections(&report);
    tracing::info!(entries = report.deliveries.len(), "replay finished; serving until interrupted");
    server.await??;
    Ok(ExitCode::SUCCESS)
}

async fn dump(args: DumpArgs) -> anyhow::Result<ExitCode> {
    if args.bucket_ms <= 0 {
        bail!("--bucket-ms must be positive");
    }
    let scenario = load_scenario(&args.scenario)?;
    let rules = match &args.rules {
        Some(path) => load_rules(path)?,
        None => RuleSet::default(),
    };
    let service = Mutex::new(replay_service(rules, &scenario, &args.engine, Pacing::Fast)?);
    let report = replay(&scenario, Pacing::Fast, &service).await;
    let svc = service.lock().unwrap();
    let store = svc.store();
    let times = store
        .simple_events()
        .iter()
        .map(|e| e.time)
        .chain(store.complex_events().map(|c| c.active_since));
    let (start, end) = times.fold((scenario.epoch_ms, scenario.epoch_ms), |(lo, hi), t| (lo.min(t), hi.max(t + 1)));
    let out = json!({
        "scenario": scenario.name,
        "range": { "start_ms": start, "end_ms": end },
        "summary": store.summary(start, end)?,
        "timeline": store.timeline(start, end, args.bucket_ms)?,
        "complex_events": store.complex_events().collect::<Vec<_>>(),
        "rejected": report.rejected.iter().map(|(line, e)| json!({ "line": line, "message": e.message })).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&out)?;
    std::fs::write(&args.out, text + "\n").with_context(|| format!("cannot write {}", args.out.display()))?;
    Ok(ExitCode::SUCCESS)
}
