mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{Cli, Command};

fn fail(kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", json!({"error": kind, "message": message}));
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            return fail("usage", first);
        }
    };
    if let Some(k) = cli.threads {
        if k == 0 {
            return fail("invalid_parameter", "invalid parameter `threads`: must be at least 1");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            return fail("threads", &e.to_string());
        }
    }
    let outcome = match &cli.command {
        Command::NoiseStats(a) => commands::noise_stats(a),
        Command::Wave(a) => commands::wave(a),
        Command::Simulate(a) => commands::simulate_cmd(a),
        Command::Flow(a) => commands::flow(a),
        Command::Compare(a) => commands::compare(a),
        Command::Lemma2(a) => commands::lemma2(a),
        Command::Sandwich(a) => commands::sandwich(a),
        Command::Report(a) => commands::report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}
