//! Command-line front end for the hydrogen Stark workbench.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::io::Write;

pub use args::{Cli, Command};
pub use error::CliError;

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Energy(a) => commands::energy(a, stdout),
        Command::States(a) => commands::states(a, stdout),
        Command::Zint(a) => commands::zint(a, stdout),
        Command::BasisPlot(a) => commands::basis_plot(a, stdout),
        Command::Numeric(a) => commands::numeric(a, stdout),
        Command::Scan(a) => commands::scan(a, stdout),
        Command::Bench(a) => commands::bench(a, stdout),
    }
}
