//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code.

mod args;
mod commands;
mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::Parser;

pub use args::{Cli, Command, Format};
pub use commands::{parse_params, sim_config};
pub use output::{fmt_sig, round_numbers, round_sig, SIGNIFICANT_DIGITS, TOOL};

use crate::error::QkdError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "QKDLAB_THREADS";

fn exit_code(e: &QkdError) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INPUT
    }
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>, String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| e.to_string())
}

fn execute(cli: &Cli) -> Result<String, QkdError> {
    let rendered = match &cli.command {
        Command::Bases(a) => commands::bases(a),
        Command::ClonerEval(a) => commands::cloner_eval(a),
        Command::Crossing(a) => commands::crossing(a),
        Command::Symmetric(a) => commands::symmetric(a),
        Command::Thresholds => commands::thresholds_cmd(),
        Command::Table(a) => commands::table(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Survey(a) => commands::survey(a),
        Command::Sweep(a) => commands::sweep(a),
    }?;
    let name = cli.command.name();
    let default = if matches!(cli.command, Command::Sweep(_)) {
        Format::Csv
    } else {
        Format::Json
    };
    match cli.format.unwrap_or(default) {
        Format::Json => Ok(output::envelope(
            name,
            rendered.input,
            rendered.seed,
            !cli.no_timestamp,
            rendered.result,
        )),
        Format::Csv => rendered
            .csv
            .ok_or_else(|| QkdError::InvalidConfig(format!("{name} has no csv output"))),
    }
}

/// Runs the tool on `args` (including the program name), writing results
/// to `out` (unless `--output` is given) and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_INPUT
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_INPUT;
        }
    };
    let result = match &pool {
        Some(p) => p.install(|| execute(&cli)),
        None => execute(&cli),
    };
    let text = match result {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, text),
        None => out.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return EXIT_INPUT;
    }
    EXIT_OK
}
