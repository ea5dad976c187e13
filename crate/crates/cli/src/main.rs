//! `chordnoise`: channel spectra, noisy evolution of packet states, Wigner
//! grids and truncated propagator spectra, written as CSV or JSON tables.
//!
//! Set `RAYON_NUM_THREADS` to limit parallelism.

use std::process::ExitCode;

use clap::Parser;

mod commands;
mod config;
mod output;

#[derive(Parser, Debug)]
#[command(name = "chordnoise", version, about = "Noise channels and noisy quantum maps on the discrete torus")]
struct Cli {
    #[command(subcommand)]
    command: config::Command,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
