use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use combclust_cli::config::Config;
use combclust_cli::error::CliError;
use combclust_cli::pipeline::{run, Inputs};
use combclust_cli::report::{render_text, Verb};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "combclust", version, about = "Combinatorial clustering pipelines")]
struct Cli {
    #[command(subcommand)]
    verb: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// TOML configuration; defaults apply to anything left out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dataset, partition or instance file (repeat for several).
    #[arg(long, global = true)]
    input: Vec<PathBuf>,
    /// Edge list (`u v [w]` lines or json).
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Partition a dataset or graph with the configured method.
    Cluster(Common),
    /// Median partition of several input partitions.
    Consensus(Common),
    /// Distance between two partitions or rankings.
    Compare(Common),
    /// Budgeted moves from the first partition towards the second.
    Restructure(Common),
    /// Assignment, GAP or access-point instance.
    Assign(Common),
    /// Multi-beam time slots from node angles.
    Schedule(Common),
    /// Quality measures of a given partition.
    Quality(Common),
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (verb, args) = match cli.verb {
        Command::Cluster(a) => (Verb::Cluster, a),
        Command::Consensus(a) => (Verb::Consensus, a),
        Command::Compare(a) => (Verb::Compare, a),
        Command::Restructure(a) => (Verb::Restructure, a),
        Command::Assign(a) => (Verb::Assign, a),
        Command::Schedule(a) => (Verb::Schedule, a),
        Command::Quality(a) => (Verb::Quality, a),
    };
    let cfg = Config::load(args.config.as_deref())?;
    let inputs = Inputs { input: args.input, graph: args.graph };
    let report = run(verb, &cfg, &inputs)?.stamped();
    let mut out = match args.format {
        Format::Json => report.to_json(),
        Format::Text => render_text(&report),
    };
    if !out.ends_with('\n') {
        out.push('\n');
    }
    match args.output {
        Some(path) => std::fs::write(&path, out).map_err(|e| CliError::io(&path, e)),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
