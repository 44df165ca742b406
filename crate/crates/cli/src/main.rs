//! Seeded, reproducible experiments over the fountain-coded edge-caching
//! model: tables, sweeps and simulations as CSV/JSON for external plotting.
//! Rerunning any command with the same seed emits byte-identical output.

mod commands;
mod config;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

#[derive(Debug, Parser)]
#[command(name = "lrfc-cache", version, about = "Fountain-coded edge caching: analysis, placement and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Subcommand)]
enum Command {
    /// Decoding-overhead table across field orders
    OverheadTable(commands::overhead_table::OverheadTableArgs),
    /// Backhaul-rate sweep over M, alpha or n
    Sweep(commands::sweep::SweepArgs),
    /// Hub-connectivity histogram of the square-grid geometry
    Geometry(commands::geometry::GeometryArgs),
    /// Monte Carlo delivery run cross-validated against the analytic rate
    Simulate(commands::simulate::SimulateArgs),
    /// Optimized per-file cache contents as JSON
    Placement(commands::placement::PlacementArgs),
}

fn fail(error: &str, code: u8) -> ExitCode {
    eprintln!("{}", serde_json::json!({ "error": error }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&e.to_string(), 2),
    };
    let result = match &cli.command {
        Command::OverheadTable(args) => commands::overhead_table::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Geometry(args) => commands::geometry::run(args),
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Placement(args) => commands::placement::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&format!("{e:#}"), 1),
    }
}
