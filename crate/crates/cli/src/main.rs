//! `tad` — build, query, benchmark and verify transfer-aware transit
//! networks from the command line.

mod bench;
mod build;
mod common;
mod gen;
mod query;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "tad",
    version,
    about = "Transfer-aware public-transit routing toolkit",
    long_about = "Earliest-arrival routing over timetables with per-stop boarding buffers and an \
                  unrestricted walking graph. Generate networks, preprocess hierarchies, answer \
                  single queries, run benchmark sweeps, and verify the engines against an exact \
                  oracle."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random network or a named fixture
    Gen(gen::GenArgs),
    /// Assemble timetable + transfer graph into query artifacts
    Build(build::BuildArgs),
    /// Answer a single earliest-arrival query
    Query(query::QueryArgs),
    /// Time engines on a deterministic random query set, report CSV
    Bench(bench::BenchArgs),
    /// Cross-check engines, filter and hierarchies on a seeded grid
    Verify(verify::VerifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => gen::run(args),
        Command::Build(args) => build::run(args),
        Command::Query(args) => query::run(args),
        Command::Bench(args) => bench::run(args),
        Command::Verify(args) => verify::run(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
