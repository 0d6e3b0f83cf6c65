//! `nipgraph`: score attention topologies, sweep sizes, compile masks, print
//! hypercube codes and run the built-in verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 computation error. Errors go to stderr as one JSON object.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use nipgraph::NipError;

#[derive(Parser, Debug)]
#[command(name = "nipgraph", version, about = "Information-payload scoring for sparse attention topologies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact and closed-form NIP of one topology.
    Score(ScoreArgs),
    /// Closed-form (and optionally exact) NIP across doubling sizes, as CSV.
    Sweep(SweepArgs),
    /// Compile a block-sparse mask to a binary file plus JSON sidecar.
    Mask(MaskArgs),
    /// Hypercube codes of a sequence, as CSV.
    Map(MapArgs),
    /// Run a verification suite: 1 = walk/path duality, 2 = block scaling.
    Verify(VerifyArgs),
    /// Closed-form NIP relative to the complete graph next to the exact
    /// sampled ratio and the published column.
    Ratio(RatioArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Ring-lattice window (even); defaults to n/16 rounded down to even, at least 2.
    #[arg(long)]
    pub w: Option<usize>,
    /// E-R edge probability; defaults to log2(n)/n.
    #[arg(long)]
    pub p: Option<f64>,
    /// Accept an edge probability below log2(n)/n.
    #[arg(long)]
    pub force: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub self_loops: bool,
    /// Divide IP by n-1 for patterns with a hub.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub refined_star: bool,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    #[arg(long, required_unless_present = "edges")]
    pub family: Option<String>,
    #[arg(long, required_unless_present = "edges")]
    pub n: Option<usize>,
    /// Score an edge-list file instead of a generated topology.
    #[arg(long, conflicts_with_all = ["family", "n"])]
    pub edges: Option<PathBuf>,
    /// Also write the scored graph as an edge list.
    #[arg(long)]
    pub save_edges: Option<PathBuf>,
    /// Also average this many seeded instances (random families).
    #[arg(long)]
    pub samples: Option<u32>,
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Families to include, comma separated; defaults to every scored family.
    #[arg(long, value_delimiter = ',')]
    pub family: Vec<String>,
    #[arg(long, default_value_t = 8)]
    pub n_min: usize,
    #[arg(long, default_value_t = 2048)]
    pub n_max: usize,
    /// Also compute exact NIP on a built graph (single seeded instance, or
    /// --samples instances for random families).
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub samples: Option<u32>,
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MaskArgs {
    #[arg(long)]
    pub pattern: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = nipgraph::mask::DEFAULT_BLOCK)]
    pub b: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Binary output; the sidecar goes next to it with a `.json` extension.
    /// Defaults to `<pattern>-n<n>-b<b>-s<seed>.nipm`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct MapArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub theorem: u32,
    /// Largest graph in the duality suite (8, 16, 32 or 64).
    #[arg(long, default_value_t = 64)]
    pub max_n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub refined_star: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RatioArgs {
    #[arg(long, default_value_t = 2048)]
    pub n: usize,
    /// Skip building graphs; print closed forms only.
    #[arg(long)]
    pub no_exact: bool,
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// How a command ended, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    Usage { kind: String, message: String },
    Compute { kind: String, message: String },
    Verification(String),
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Failure {
        Failure::Usage {
            kind: "Usage".into(),
            message: message.into(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Usage { .. } => 2,
            Failure::Compute { .. } => 3,
        }
    }

    fn report(&self) -> String {
        let (kind, message) = match self {
            Failure::Usage { kind, message } | Failure::Compute { kind, message } => {
                (kind.as_str(), message.as_str())
            }
            Failure::Verification(m) => ("VerificationFailed", m.as_str()),
        };
        serde_json::json!({ "error": kind, "message": message }).to_string()
    }
}

impl From<NipError> for Failure {
    fn from(e: NipError) -> Self {
        let kind = e.kind().to_string();
        let message = e.to_string();
        if e.is_usage() {
            Failure::Usage { kind, message }
        } else {
            Failure::Compute { kind, message }
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute {
            kind: "Io".into(),
            message: e.to_string(),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Compute {
            kind: "Io".into(),
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let f = Failure::usage(e.to_string().trim_end());
            eprintln!("{}", f.report());
            return ExitCode::from(f.exit_code());
        }
    };
    let result = match cli.command {
        Command::Score(a) => commands::score(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Mask(a) => commands::mask(&a),
        Command::Map(a) => commands::map(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Ratio(a) => commands::ratio(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.report());
            ExitCode::from(f.exit_code())
        }
    }
}
