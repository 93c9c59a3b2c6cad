//! Command-line front end: function construction from flags or a JSON
//! config, execution of the diagnostics, and report serialisation.
//!
//! Exit codes: 0 when every asserted check passes (estimates never fail),
//! 2 on a check failure, 1 on usage or I/O errors.

mod commands;
mod config;
mod output;

use clap::Parser;

use crate::config::Cli;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own exit code conventions differ; usage errors are 1 here
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
