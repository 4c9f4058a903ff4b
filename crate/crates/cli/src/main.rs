//! `kdlab` command line: exact quasiprobability reports, Haar-random
//! sweeps, protocol-circuit emulation, and benchmark tables.

mod commands;
mod config;

use clap::{Parser, Subcommand};

use config::CommonFlags;

#[derive(Parser)]
#[command(
    name = "kdlab",
    version,
    about = "Numerical laboratory for Kirkwood-Dirac quasiprobability distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: CommonFlags,
}

#[derive(Subcommand)]
enum Command {
    /// Exact KD/TPM tables, modification terms, and measures.
    Exact,
    /// Haar-random heatmap and CDF sweeps over (omega, tau_a).
    Sweep,
    /// Protocol-circuit estimation with shots and optional noise.
    Circuit,
    /// Comparison table against exact theory and published references.
    Bench,
}

/// Map an error to a stable single-line category for scripting.
fn category(err: &anyhow::Error) -> &'static str {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<kdlab::Error>() {
            return e.category();
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return "io";
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return "config";
        }
    }
    "config"
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let config = cli.flags.resolve()?;
    let out = cli.flags.out.as_deref();
    match cli.command {
        Command::Exact => commands::run_exact(&config, out),
        Command::Sweep => commands::run_sweep(&config, out),
        Command::Circuit => commands::run_circuit(&config, out),
        Command::Bench => commands::run_bench(&config, out),
    }
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error[{}]: {err:#}", category(&err));
        std::process::exit(1);
    }
}
