//! Library half of the `qmetro` command-line tool.
//!
//! [`run`] executes one parsed [`Command`]; the binary only maps the result to
//! an exit code.

// `!(x > 0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
mod commands;
pub mod output;

pub use args::{Cli, Command};
pub use commands::{SWEEP_FIXED_COLUMNS, SWEEP_TRAILING_COLUMNS};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, domains or files; exit code 2.
    #[error("{0}")]
    Input(String),
    /// Numerical or fit failure; exit code 3.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}

impl From<qmetro::Error> for CliError {
    fn from(e: qmetro::Error) -> Self {
        if e.is_input_error() {
            Self::Input(e.to_string())
        } else {
            Self::Numerical(e.to_string())
        }
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Replay(a) => {
            let manifest = output::RunManifest::load(&a.manifest)?;
            let mut recorded = manifest.to_command()?;
            if a.out.is_some() {
                recorded.set_out(a.out);
            }
            run(recorded)
        }
        other => {
            let text = commands::execute(&other)?;
            output::emit(&other, &text.body)?;
            text.status
        }
    }
}
