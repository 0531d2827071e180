//! `skewchain` — graph analysis, switched-flow simulation, metrics, chain sets
//! and chain stitching, driven by a TOML experiment document.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{ExperimentConfig, MetricKind};

#[derive(Debug, Parser)]
#[command(name = "skewchain", version, about)]
struct Cli {
    /// Experiment document (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `run.out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Metric truncation tolerance; overrides `run.tolerance`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Defaults to `run.command` from the config.
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate the graph, decompose it into SCCs and certify each component.
    AnalyzeGraph,
    /// Integrate the switched system along a signal and write the trajectory.
    Simulate(SimulateArgs),
    /// Evaluate a sequence, signal or product-space distance.
    Metric(MetricArgs),
    /// Approximate the chain-recurrent components of the state box.
    ChainSets,
    /// Stitch a random chain of signals into a continuous orbit sequence.
    StitchDemo,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::AnalyzeGraph => "analyze-graph",
            Command::Simulate(_) => "simulate",
            Command::Metric(_) => "metric",
            Command::ChainSets => "chain-sets",
            Command::StitchDemo => "stitch-demo",
        }
    }
}

#[derive(Debug, Default, Args)]
struct SimulateArgs {
    /// Initial state, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,
    /// Signal literal, e.g. `left=(A) core=[AB] right=(B) tau=0.3`.
    #[arg(long)]
    signal: Option<String>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    sample_dt: Option<f64>,
}

#[derive(Debug, Default, Args)]
struct MetricArgs {
    #[arg(long, value_enum)]
    kind: Option<MetricKind>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| config::invalid("--config is required"))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(tol) = cli.tol {
        if !(tol > 0.0) {
            return Err(config::invalid("--tol must be positive").into());
        }
        cfg.run.tolerance = tol;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.run.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;

    let command = match cli.command {
        Some(c) => c,
        None => match cfg.run.command.as_deref() {
            Some("analyze-graph") => Command::AnalyzeGraph,
            Some("simulate") => Command::Simulate(SimulateArgs::default()),
            Some("metric") => Command::Metric(MetricArgs::default()),
            Some("chain-sets") => Command::ChainSets,
            Some("stitch-demo") => Command::StitchDemo,
            Some(other) => return Err(config::invalid(format!("unknown run.command `{other}`")).into()),
            None => return Err(config::invalid("no subcommand given and no run.command in the config").into()),
        },
    };
    cfg.run.command = Some(command.name().to_string());

    match command {
        Command::AnalyzeGraph => commands::analyze_graph(&cfg, &out),
        Command::Simulate(a) => {
            let mut s = cfg.run.simulate.clone().unwrap_or_default();
            if let Some(x0) = a.x0 {
                s.x0 = x0;
            }
            if let Some(sig) = a.signal {
                s.signal = sig;
            }
            if let Some(t) = a.t_end {
                s.t_end = t;
            }
            if let Some(dt) = a.sample_dt {
                s.sample_dt = dt;
            }
            cfg.run.simulate = Some(s);
            commands::simulate(&cfg, &out)
        }
        Command::Metric(a) => {
            let m = match (cfg.run.metric.clone(), a.kind, a.a, a.b) {
                (Some(mut m), kind, x, y) => {
                    m.kind = kind.unwrap_or(m.kind);
                    m.a = x.unwrap_or(m.a);
                    m.b = y.unwrap_or(m.b);
                    m
                }
                (None, Some(kind), Some(x), Some(y)) => config::MetricBlock {
                    kind,
                    a: x,
                    b: y,
                    xa: None,
                    xb: None,
                    isometry: false,
                },
                _ => return Err(config::invalid("metric needs [run.metric] or --kind, --a and --b").into()),
            };
            cfg.run.metric = Some(m);
            commands::metric(&cfg, &out)
        }
        Command::ChainSets => commands::chain_sets(&cfg, &out),
        Command::StitchDemo => commands::stitch_demo(&cfg, &out),
    }
}

/// 2 for invalid input, 3 for numerical failure, 4 for resource guards.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<skewchain::Error>() {
            return match e {
                skewchain::Error::Integration(_) => 3,
                skewchain::Error::ResourceGuard(_) => 4,
                _ => 2,
            };
        }
        if cause.downcast_ref::<toml::de::Error>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<commands::Failure>() {
            return e.code();
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
