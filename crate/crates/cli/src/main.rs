//! `den-embed`: generate datasets, embed graphs, run sweeps, check coordinates.
//!
//! Exit codes: 0 success or feasible, 1 internal error, 2 usage or parse
//! error, 3 clean run that found no feasible embedding.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use den_core::{DomainParams, Initializer};

pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "den-embed", version, about = "Unit disk graph embeddings for neutral-atom registers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate gate-accepted random unit disk graphs.
    GenDataset(GenDatasetArgs),
    /// Run one learning phase on one graph.
    Embed(EmbedArgs),
    /// Run the full hyperparameter grid on every graph of a dataset.
    Sweep(SweepArgs),
    /// Verify a coordinate file against a graph.
    Check(CheckArgs),
}

/// Register parameters, micrometres.
#[derive(Args, Debug, Clone)]
pub struct DomainArgs {
    /// Minimum separation of any two atoms.
    #[arg(long, default_value_t = 4.0)]
    pub dmin: f64,
    /// Unit disk radius: adjacent atoms must be within this distance.
    #[arg(long, default_value_t = 10.26)]
    pub dadj: f64,
    /// Half-width of the register; coordinates lie in [-L, L].
    #[arg(long = "L", default_value_t = 50.0)]
    pub l: f64,
    /// Required clearance beyond `dadj` for non-adjacent atoms.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Objective penalty offset.
    #[arg(long, default_value_t = 1.0)]
    pub iota: f64,
}

impl DomainArgs {
    pub fn params(&self) -> DomainParams {
        DomainParams {
            d_min: self.dmin,
            d_adj: self.dadj,
            l: self.l,
            epsilon: self.eps,
            iota: self.iota,
        }
    }
}

#[derive(Args, Debug)]
pub struct GenDatasetArgs {
    /// Graph sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50,60,70,80,90,100")]
    pub n_list: Vec<usize>,
    /// Graphs per size.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct GraphRef {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub graph_id: String,
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub graph: GraphRef,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub dim: u8,
    #[arg(long, default_value = "fr")]
    pub init: Initializer,
    #[arg(long, default_value_t = 0.001)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.5)]
    pub pdrop: f64,
    #[arg(long, default_value_t = den_core::trainer::DEFAULT_EPOCHS)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trial result JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Register view of the best embedding.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub domain: DomainArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub dim: u8,
    /// Concurrent trials per graph; 0 uses every core.
    #[arg(long, env = "DEN_WORKERS", default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = den_core::trainer::DEFAULT_EPOCHS)]
    pub epochs: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub domain: DomainArgs,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Coordinates: a bare `[[x, y], ...]` array, an embedding, a trial result
    /// or a sweep summary.
    #[arg(long)]
    pub coords: PathBuf,
    #[command(flatten)]
    pub graph: GraphRef,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub domain: DomainArgs,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_USAGE,
            error: error.into(),
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(error: E) -> Self {
        Self {
            code: EXIT_INTERNAL,
            error: error.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenDataset(a) => commands::gen_dataset(&a),
        Command::Embed(a) => commands::embed(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Check(a) => commands::check(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
