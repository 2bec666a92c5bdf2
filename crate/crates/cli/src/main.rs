//! `heun-tridiag`: exact constructions and verification suites from the
//! command line. Exit codes: 0 all checks pass, 1 some check failed,
//! 2 unusable input (an error object is printed instead of a report).

mod args;
mod commands;
mod output;
mod selftest;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use output::{error_object, Output};

const THREADS_VAR: &str = "HEUN_TRIDIAG_THREADS";

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("{THREADS_VAR} must be an integer >= 1, got {raw:?}"))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn dispatch(command: &Command) -> heun_tridiag::Result<Output> {
    match command {
        Command::Construct { config, n_max } => commands::construct(config, *n_max),
        Command::VerifyAlgebra { config, degree } => commands::verify_algebra_cmd(config, *degree),
        Command::Casimir { config } => commands::casimir_cmd(config),
        Command::Tridiag { config, n_max } => commands::tridiag(config, *n_max),
        Command::HeunPolys { config, n } => commands::heun_polys(config, *n),
        Command::RacahHeun { config, n_max, grid } => commands::racah_heun(config, *n_max, grid),
        Command::WilsonCompare { config, n_max } => commands::wilson(config, *n_max),
        Command::Su11 { su11, degree } => commands::su11(su11, *degree),
        Command::Selftest { seed, samples } => Ok(selftest::selftest(*seed, *samples)),
    }
}

fn emit(text: &str, path: Option<&std::path::Path>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn fail(kind: &str, message: &str) -> ExitCode {
    let _ = emit(&error_object(kind, message), None);
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("Usage", e.to_string().trim_end()),
    };
    if let Err(message) = configure_threads() {
        return fail("Environment", &message);
    }
    let out = match dispatch(&cli.command) {
        Ok(out) => out,
        Err(e) => return fail(e.kind(), &e.to_string()),
    };
    let text = match out.render(cli.output.output, cli.output.table.as_deref()) {
        Ok(text) => text,
        Err(e) => return fail("UnknownTable", &e.to_string()),
    };
    if let Err(e) = emit(&text, cli.output.out.as_deref()) {
        return fail("Io", &e.to_string());
    }
    if out.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
