// Copyright 2026 The hetero-oracle Contributors
// SPDX-License-Identifier: Apache-2.0

//! `hetero-oracle`: simulate, audit and tabulate the adaptive estimator.
//!
//! Exit status: 0 when every asserted inequality holds, 1 when one fails,
//! 2 on an invalid configuration or any other error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::Outcome;
use crate::config::{ConfigError, ModeName, Overrides};

#[derive(Parser)]
#[command(
    name = "hetero-oracle",
    version,
    about = "Adaptive estimation in heteroscedastic regression: simulations and oracle audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one sample per scenario and n, fit it, and dump the estimate on a 1000-point grid.
    Simulate(Common),
    /// Monte Carlo audit of the oracle inequality over each scenario's n list.
    Audit(Common),
    /// Run the full lemma verification suite.
    Lemmas(Common),
    /// Tabulate the oracle constants along each scenario's n list.
    Constants(Common),
    /// Print the weight family statistics and per-member bandwidths.
    Sieve(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// TOML experiment file with `[[scenario]]` tables.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default `results`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Comma-separated odd sample sizes, replacing every scenario's n list.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Estimated,
    Known,
}

impl From<ModeArg> for ModeName {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Estimated => ModeName::Estimated,
            ModeArg::Known => ModeName::Known,
        }
    }
}

fn configure_threads() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var("HETERO_ORACLE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t >= 1).ok_or_else(|| ConfigError {
        field: "HETERO_ORACLE_THREADS".into(),
        message: format!("`{raw}` is not a positive integer"),
    })?;
    // Fails only if a pool already exists, which cannot happen this early.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    configure_threads()?;
    let (cmd, common) = match &cli.command {
        Command::Simulate(c) => ("simulate", c),
        Command::Audit(c) => ("audit", c),
        Command::Lemmas(c) => ("lemmas", c),
        Command::Constants(c) => ("constants", c),
        Command::Sieve(c) => ("sieve", c),
    };
    let ov = Overrides {
        seed: common.seed,
        replications: common.replications,
        mode: common.mode.map(Into::into),
        out: common.out.clone(),
        n_list: common.n.clone(),
    };
    if let Some(list) = &ov.n_list {
        config::validate_n_list(list, "--n")?;
    }
    let cfg = config::load(common.config.as_deref(), &ov)?;
    log::info!(
        "{cmd}: {} scenario(s), output in {}",
        cfg.scenarios.len(),
        cfg.out.display()
    );
    match cmd {
        "simulate" => commands::simulate(&cfg),
        "audit" => commands::audit(&cfg),
        "lemmas" => commands::lemmas(&cfg.out, common.seed, common.replications),
        "constants" => commands::constants(&cfg),
        _ => commands::sieve(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
