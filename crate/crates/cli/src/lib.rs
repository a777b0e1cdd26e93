//! Command-line front end for the `stabilimeter` library.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;

use std::ffi::OsString;

use clap::Parser;

pub use error::{exit, CliError, CliResult};

/// Parse `args` (program name first), run the command and return the exit code.
pub fn main_with_args(args: impl IntoIterator<Item = OsString>) -> u8 {
    let args = match config::expand_config(args.into_iter().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match args::Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    match commands::run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
