//! `varieties`: command-line driver for the verification toolkit.
//!
//! Exit codes: 0 verified, 1 refuted, 2 inconclusive (including exhausted
//! budgets), 64 usage or input errors.

mod args;
mod commands;
mod report;

use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use varieties_core::Error;

use crate::args::Cli;

const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };

    if let Some(n) = cli.global.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }

    let start = Instant::now();
    let (command, config, finding) = match commands::run(&cli.command) {
        Ok(done) => done,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(match e {
                Error::Budget(_) => EXIT_INCONCLUSIVE,
                _ => EXIT_USAGE,
            });
        }
    };
    let timing = cli.global.timing.then(|| start.elapsed().as_millis() as u64);
    let report = report::envelope(command, config, &finding, timing);
    let text = report::render(&report, cli.global.format);
    match &cli.global.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(finding.outcome.exit_code() as u8)
}
