//! `mvgraph` command-line tool: file-in/file-out pipelines over the library.
//!
//! Each subcommand writes its declared outputs plus `<out>.manifest.json`.
//! Exit codes: 0 ok, 1 I/O, 2 invalid input, 3 infeasible scenario,
//! 4 non-convergence.

mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "mvgraph", version, about = "Temporal multi-layer graph toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Generate a seeded scenario graph as an interchange JSON file.
    Gen {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        seed: u64,
        /// Generator config (JSON); `--seed` overrides its seed field.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Structural metrics of one layer as `metric,vertex_id,score` CSV.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        layer: String,
        /// Comma-separated: degree, betweenness, clustering, components.
        #[arg(long, value_delimiter = ',', required = true)]
        metrics: Vec<Metric>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Spectral k-way partition of one layer.
    Partition {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        layer: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Isolated and/or coupled cross-domain allocation.
    Optimize {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum)]
        mode: OptMode,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Consensus, replica consistency or CDN placement on a graph file.
    Simulate {
        #[arg(long, value_enum)]
        kind: SimKind,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-export a graph file as canonical JSON or DOT.
    Export {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Degree,
    Betweenness,
    Clustering,
    Components,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OptMode {
    Isolated,
    Coupled,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimKind {
    Consensus,
    Consistency,
    Cdn,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Dot,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = serde_json::to_value(&cli.command).expect("arguments serialize");
    let result = match cli.command {
        Command::Gen {
            scenario,
            seed,
            params,
            out,
        } => commands::gen(config, &scenario, seed, params.as_deref(), &out),
        Command::Analyze {
            input,
            layer,
            metrics,
            out,
        } => commands::analyze(config, &input, &layer, &metrics, &out),
        Command::Partition {
            input,
            layer,
            k,
            out,
        } => commands::partition(config, &input, &layer, k, &out),
        Command::Optimize {
            scenario,
            mode,
            seed,
            out,
        } => commands::optimize(config, &scenario, mode, seed, &out),
        Command::Simulate {
            kind,
            input,
            params,
            out,
        } => commands::simulate(config, kind, &input, params.as_deref(), &out),
        Command::Export { input, format, out } => commands::export(config, &input, format, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
