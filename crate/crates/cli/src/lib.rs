//! Command-line front end for `reweigh-core`: prediction CSVs, weights
//! envelopes, and the `fit`, `apply`, `eval`, `elicit`, `bench` and `synth`
//! commands.

pub mod args;
pub mod commands;
pub mod error;
pub mod experiments;
pub mod io;

use std::io::Write;

pub use args::{Cli, Command};
pub use error::{CliError, Result};

/// Runs one parsed command, writing its report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Fit(a) => commands::cmd_fit(a, out),
        Command::Apply(a) => commands::cmd_apply(a, out),
        Command::Eval(a) => commands::cmd_eval(a, out),
        Command::Elicit(a) => experiments::cmd_elicit(a, out),
        Command::Bench(a) => experiments::cmd_bench(a, out),
        Command::Synth(a) => experiments::cmd_synth(a, out),
    }
}
