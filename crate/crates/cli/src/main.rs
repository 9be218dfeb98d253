//! `xps-susy <task> --config <file.json> --out <dir>`
//!
//! Exit status: 0 success, 1 I/O failure, 2 invalid configuration (nothing written),
//! 3 numerical failure (partial results written and flagged in the manifest).

// `!(x > 0.0)` deliberately rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod report;
mod tasks;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rayon::prelude::*;
use serde_json::Value;
use sha2::{Digest, Sha256};

use config::{set_path, ExperimentConfig, Task};
use report::{write_run, write_sweep, RunInfo, SweepRow};
use tasks::{execute, prepare};

#[derive(Debug, Parser)]
#[command(name = "xps-susy", version, about = "Extended phase space SUSY quantum mechanics experiments")]
struct Cli {
    task: Task,
    /// JSON experiment description.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Recorded in the manifest; no task is stochastic.
    #[arg(long)]
    seed: Option<u64>,
    /// Also emit a static SVG plot of the main table.
    #[arg(long)]
    svg: bool,
}

enum Exit {
    Config(String),
    Numerical(String),
    Io(anyhow::Error),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
        Err(Exit::Numerical(m)) => {
            eprintln!("numerical error: {m}");
            ExitCode::from(3)
        }
        Err(Exit::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn parse(v: Value) -> Result<ExperimentConfig, String> {
    serde_json::from_value(v).map_err(|e| format!("config: {e}"))
}

fn thread_pool() -> Result<rayon::ThreadPool, Exit> {
    let threads = match std::env::var("XPS_SUSY_THREADS") {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => return Err(Exit::Config(format!("XPS_SUSY_THREADS: expected a positive integer, got `{s}`"))),
        },
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Exit::Io(e.into()))
}

fn run(cli: &Cli) -> Result<(), Exit> {
    let bytes = fs::read(&cli.config).map_err(|e| Exit::Config(format!("--config {}: {e}", cli.config.display())))?;
    let hash = format!("{:x}", Sha256::digest(&bytes));
    let info = RunInfo { config_sha256: &hash, seed: cli.seed };
    let raw: Value = serde_json::from_slice(&bytes).map_err(|e| Exit::Config(format!("config: {e}")))?;
    let cfg = parse(raw.clone()).map_err(Exit::Config)?;

    let Some(sweep) = &cfg.sweep else {
        let job = prepare(cli.task, &cfg).map_err(Exit::Config)?;
        log::info!("running {}", cli.task.name());
        return match execute(&job) {
            Ok(rep) => write_run(&cli.out, &rep, &info, None, cli.svg).map_err(Exit::Io),
            Err(f) if f.error.is_numerical() => {
                let msg = f.error.to_string();
                write_run(&cli.out, &f.partial, &info, Some(msg.clone()), cli.svg).map_err(Exit::Io)?;
                Err(Exit::Numerical(msg))
            }
            Err(f) => Err(Exit::Config(format!("task {}: {}", cli.task.name(), f.error))),
        };
    };

    let points = sweep.points().map_err(Exit::Config)?;
    let mut base = raw;
    if let Some(obj) = base.as_object_mut() {
        obj.remove("sweep");
    }
    set_path(&mut base.clone(), &sweep.parameter, 0.0).map_err(Exit::Config)?;
    let jobs = points
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut v = base.clone();
            set_path(&mut v, &sweep.parameter, x)?;
            parse(v)
                .and_then(|c| prepare(cli.task, &c))
                .map_err(|e| format!("sweep point {i} ({} = {x}): {e}", sweep.parameter))
        })
        .collect::<Result<Vec<_>, String>>()
        .map_err(Exit::Config)?;

    let pool = thread_pool()?;
    log::info!("sweeping {} over {} points", sweep.parameter, points.len());
    let rows: Vec<SweepRow> = pool.install(|| {
        jobs.par_iter()
            .zip(points.par_iter())
            .map(|(job, &value)| SweepRow {
                value,
                outcome: execute(job).map_err(|f| (*f.partial, f.error.to_string())),
            })
            .collect()
    });
    let failures = write_sweep(&cli.out, cli.task, &sweep.parameter, &rows, &info).map_err(Exit::Io)?;
    if failures > 0 {
        return Err(Exit::Numerical(format!("{failures} of {} sweep points failed", rows.len())));
    }
    Ok(())
}
