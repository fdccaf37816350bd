//! Command-line front end: argument parsing, config files, on-disk artifacts
//! and the subcommand implementations.

pub mod args;
pub mod artifacts;
pub mod commands;
pub mod settings;

use std::ffi::OsString;

use clap::Parser;
use modalcores::{Error, ErrorCategory, Result};

use crate::args::{Cli, Command};

pub const THREADS_ENV: &str = "MODALCORES_THREADS";

/// Process exit status for an error: 1 I/O, 2 configuration, 3 data.
pub fn exit_code(err: &Error) -> i32 {
    match err.category() {
        ErrorCategory::Io => 1,
        ErrorCategory::Config => 2,
        ErrorCategory::Data => 3,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::InvalidConfig(format!("{THREADS_ENV}={raw:?} is not a positive integer")))?;
    // Fails only if a pool already exists, which is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::Fit(c) => commands::cmd_fit(c).map(drop),
        Command::Assign(c) => commands::cmd_assign(c).map(drop),
        Command::Sweep(c) => commands::cmd_sweep(c).map(drop),
        Command::Gen(c) => commands::cmd_gen(c),
        Command::Eval(c) => commands::cmd_eval(c).map(drop),
        Command::Bench(c) => commands::cmd_bench(c).map(drop),
        Command::Dbscan(c) => commands::cmd_dbscan(c).map(drop),
        Command::Replay(c) => commands::cmd_replay(c).map(drop),
    }
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_category() {
        assert_eq!(exit_code(&Error::io("x", std::io::Error::other("boom"))), 1);
        assert_eq!(exit_code(&Error::InvalidConfig("k".into())), 2);
        assert_eq!(exit_code(&Error::EmptyDataset), 3);
    }
}
