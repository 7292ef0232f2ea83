//! `ade`: classify signed graphs, reduce them to ADE diagrams with
//! congruence certificates, and analyze positive braids.

mod commands;
mod dot;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "ade", version, about = "Exact ADE classification of signed graphs", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report determinant, inertia, definiteness and ADE types of a graph.
    ///
    /// Exits 4 when the Gram form is not positive definite; the report then
    /// carries an integer witness vector.
    Classify {
        /// Graph in the signed-graph text format.
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Reduce a connected positive graph to its ADE diagram.
    ///
    /// Exits 4 on non-positive input and 5 when no move sequence is found.
    Reduce(ReduceArgs),
    /// Replay a transcript document and check its congruence certificate.
    Verify {
        /// Transcript JSON as written by `reduce --emit-certificate`.
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Mine the minimal non-positive trees and print them with a manifest.
    Minors {
        #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u64).range(1..=10))]
        max_n: u64,
        #[arg(long)]
        json: bool,
    },
    /// Positive braid closures.
    #[command(subcommand)]
    Braid(BraidCommand),
    /// Plane graphs with a checkerboard structure.
    #[command(subcommand)]
    Checkerboard(CheckerboardCommand),
    /// Run an exhaustive brute-force cross-check.
    Oracle {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        /// Largest vertex count; defaults to the suite's usual bound.
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct ReduceArgs {
    /// Graph text file (plane-graph text for `--mode checkerboard`).
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::T)]
    mode: ModeArg,
    /// Print the transcript document with its certificate as JSON.
    #[arg(long)]
    emit_certificate: bool,
    /// Write the start and end graphs in DOT.
    #[arg(long, value_name = "FILE")]
    dot: Option<PathBuf>,
    /// Print the full reduction result as JSON.
    #[arg(long)]
    json: bool,
    /// Node budget for each search.
    #[arg(long, default_value_t = 200_000)]
    node_limit: usize,
}

#[derive(Subcommand, Debug)]
enum BraidCommand {
    /// Seifert form invariants of the closure of a positive braid word.
    ///
    /// Words are letters such as "s1 s2 s1" or "1 2 1".
    Analyze {
        word: String,
        /// Also reduce the linking graph to ADE diagrams.
        #[arg(long)]
        reduce: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand, Debug)]
enum CheckerboardCommand {
    /// Check the face two-colouring and directedness conditions.
    Validate {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Reduce using only moves that keep a checkerboard structure.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        emit_certificate: bool,
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 200_000)]
        node_limit: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    T,
    Tprime,
    Checkerboard,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteArg {
    Definiteness,
    Equivalence,
    Lemma33,
    Degree6,
    Coherence,
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Classify { file, json } => commands::classify(&file, json),
        Command::Reduce(a) => commands::reduce(&commands::ReduceOptions {
            file: a.file,
            mode: a.mode,
            emit_certificate: a.emit_certificate,
            dot: a.dot,
            json: a.json,
            node_limit: a.node_limit,
        }),
        Command::Verify { file, json } => commands::verify(&file, json),
        Command::Minors { max_n, json } => commands::minors(max_n as usize, json),
        Command::Braid(BraidCommand::Analyze { word, reduce, json }) => commands::braid(&word, reduce, json),
        Command::Checkerboard(CheckerboardCommand::Validate { file, json }) => commands::validate(&file, json),
        Command::Checkerboard(CheckerboardCommand::Reduce {
            file,
            emit_certificate,
            dot,
            json,
            node_limit,
        }) => commands::reduce(&commands::ReduceOptions {
            file,
            mode: ModeArg::Checkerboard,
            emit_certificate,
            dot,
            json,
            node_limit,
        }),
        Command::Oracle { suite, max_n, json } => commands::oracle(suite, max_n, json),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
