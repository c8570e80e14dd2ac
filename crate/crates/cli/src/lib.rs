//! Command-line front end for `memspin-core`: figure tables as CSV or JSON,
//! and the Monte-Carlo validation run.
//!
//! All times are in units of the perpendicular correlation time `τ_c`.

pub mod commands;
pub mod config;
pub mod error;
pub mod montecarlo;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

pub use config::{parse_args, RunConfig};
pub use error::{CliError, Result};
pub use output::Table;

use config::{Format, ParseOutcome};

pub fn write_table(table: &Table, config: &RunConfig) -> Result<()> {
    let sink: Box<dyn Write> = match &config.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    match config.format {
        Format::Csv => table.write_csv(&mut w)?,
        Format::Json => table.write_json(&mut w)?,
    }
    w.flush()?;
    Ok(())
}

/// Runs one invocation and returns the process exit code.
pub fn main_with_args(args: Vec<OsString>) -> i32 {
    let config = match parse_args(args) {
        Ok(c) => c,
        Err(ParseOutcome::Clap(e)) => {
            let _ = e.print();
            return e.exit_code();
        }
        Err(ParseOutcome::Invalid(e)) => {
            eprintln!("memspin: {e}");
            return e.exit_code();
        }
    };
    match commands::run(&config).and_then(|t| write_table(&t, &config)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("memspin: {e}");
            e.exit_code()
        }
    }
}
