mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};

use args::{Cli, Command};
use commands::Ctx;
use mtpairs::Error;

/// Exit codes: 0 success, 1 usage, 2 data validation, 3 degenerate statistics.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_) | Error::Parse(_) | Error::UnsupportedMetric(_) => 1,
        e if e.is_degenerate() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();

    let raw: Vec<_> = std::env::args_os().collect();
    let command_line = raw.iter().map(|a| a.to_string_lossy()).collect::<Vec<_>>().join(" ");
    let args = match config::expand_args(raw, &Cli::command()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::command().try_get_matches_from(args).and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };

    let ctx = Ctx {
        global: &cli.global,
        command_line,
    };
    let result = match &cli.command {
        Command::Ingest(a) => commands::ingest(&ctx, a),
        Command::Validate => commands::validate(&ctx),
        Command::Score(a) => commands::score(&ctx, a),
        Command::HumanTest(a) => commands::human_test(&ctx, a),
        Command::Accuracy(a) => commands::accuracy(&ctx, a),
        Command::Scatter(a) => commands::scatter(&ctx, a),
        Command::Clusters(a) => commands::clusters(&ctx, a),
        Command::Sigtest(a) => commands::sigtest(&ctx, a),
        Command::Quadrants(a) => commands::quadrants(&ctx, a),
        Command::Meta(a) => commands::meta(&ctx, a),
        Command::Report(a) => commands::report(&ctx, a),
        Command::Compare(a) => commands::compare(&ctx, a),
        Command::Pipeline(a) => commands::pipeline(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
