//! `dim`: replays an update stream and writes a JSON-lines report.
//!
//! Exit codes: 0 on success, 1 on runtime errors, 2 on malformed input.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use dim_core::engine::EngineConfig;
use dim_core::harness::{registered_modes, run, RunOptions};
use dim_core::{parse_stream, Model};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Ic,
    Lt,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Ic => Model::Ic,
            ModelArg::Lt => Model::Lt,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dim", version, about = "Maintain influential seed sets over a growing graph")]
struct Args {
    #[arg(long, value_enum, default_value = "ic")]
    model: ModelArg,
    /// Seed budget.
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
    /// Failure probability.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Sampling constant; must exceed 24.
    #[arg(long, default_value_t = 25.0)]
    c: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maintainer: `engine` or `baseline`.
    #[arg(long, default_value = "engine", value_parser = mode_name)]
    mode: String,
    /// Event stream; `-` reads stdin.
    #[arg(long, default_value = "-")]
    stream: PathBuf,
    /// Report destination; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Monte Carlo trials per query for an independent spread check (0 = off).
    #[arg(long, default_value_t = 0)]
    mc_trials: u64,
    /// Include wall-clock times in the report.
    #[arg(long)]
    timing: bool,
}

fn mode_name(s: &str) -> Result<String, String> {
    let names: Vec<&str> = registered_modes().iter().map(|(n, _)| *n).collect();
    if names.contains(&s) {
        Ok(s.to_string())
    } else {
        Err(format!("expected one of {}", names.join(", ")))
    }
}

fn read_stream(path: &PathBuf) -> io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path)
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let options = RunOptions {
        mode: args.mode,
        engine: EngineConfig {
            k: args.k,
            epsilon: args.epsilon,
            delta: args.delta,
            c: args.c,
            model: args.model.into(),
            rng_seed: args.seed,
            ..EngineConfig::default()
        },
        mc_trials: args.mc_trials,
        timing: args.timing,
    };
    if let Err(e) = options.engine.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let text = match read_stream(&args.stream) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: reading {}: {e}", args.stream.display());
            return ExitCode::from(1);
        }
    };
    let events = match parse_stream(&text) {
        Ok(ev) => ev,
        Err(e) => {
            eprintln!("parse error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&options, &events) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let out = report.to_json_lines();
    let written = match &args.report {
        Some(path) => fs::write(path, out),
        None => io::stdout().lock().write_all(out.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
