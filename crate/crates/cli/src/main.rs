mod cli;
mod commands;
mod config;
mod grid;
mod table;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use sixvertex_core::Error;

use crate::cli::{Cli, Format};
use crate::config::RunConfig;

/// Exit status 2 for bad input, 1 for a computation that could not finish.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Domain(_)
            | Error::PhaseDomain { .. }
            | Error::WrongPhase { .. }
            | Error::UnsupportedSize { .. }
            | Error::InsufficientRange { .. } => Failure::Input(msg),
            _ => Failure::Compute(msg),
        }
    }
}

impl Failure {
    fn exit(&self) -> ExitCode {
        match self {
            Failure::Input(m) => {
                eprintln!("error: {m}");
                ExitCode::from(2)
            }
            Failure::Compute(m) => {
                eprintln!("error: {m}");
                ExitCode::from(1)
            }
        }
    }
}

fn emit(cfg: &RunConfig, report: &commands::Report) -> Result<(), Failure> {
    let table = &report.table;
    let body = match cfg.format {
        Format::Csv => table.csv(),
        Format::Json => table.json(),
    };
    let io = |e: std::io::Error| Failure::Compute(format!("cannot write output: {e}"));
    match &cfg.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure::Compute(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout().lock().write_all(body.as_bytes()).map_err(io)?,
    }
    if cfg.format == Format::Csv {
        eprint!("{}", table.summary_text());
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<bool, Failure> {
    let cfg = RunConfig::resolve(cli)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cfg.jobs {
        pool = pool.num_threads(jobs);
    }
    let pool = pool
        .build()
        .map_err(|e| Failure::Compute(format!("cannot start worker pool: {e}")))?;
    let report = pool.install(|| commands::run(&cfg))?;
    emit(&cfg, &report)?;
    Ok(report.all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(1)
        }
        Err(f) => f.exit(),
    }
}
