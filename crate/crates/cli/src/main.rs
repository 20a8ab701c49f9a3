mod args;
mod commands;
mod config;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::{Cli, Command};
use commands::Status;

fn run(cli: Cli) -> Result<Status> {
    let cfg = config::load(cli.config.as_deref())?;
    if let Some(jobs) = cli.jobs.or(cfg.jobs) {
        if jobs == 0 {
            anyhow::bail!("jobs must be >= 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.into())
            .build_global()
            .context("cannot configure the worker pool")?;
    }
    match &cli.command {
        Command::Eval(a) => commands::eval::run(a, &cfg.eval),
        Command::Curve(a) => commands::curve::run(a, &cfg.curve),
        Command::Encode(a) => commands::encode::run(a, &cfg.encode),
        Command::Perturb(a) => commands::perturb::run(a, &cfg.perturb),
        Command::GradCheck(a) => commands::gradcheck::run(a, &cfg.grad_check),
        Command::MatchDemo(a) => commands::matchdemo::run(a, &cfg.match_demo),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // --help and --version are not errors.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
