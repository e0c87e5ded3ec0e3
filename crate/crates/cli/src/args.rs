use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "enet", version, about = "Evaluation nets: validate, simulate, analyze; risk registers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and check a net file.
    Validate(FileArgs),
    /// Print a net file in canonical form.
    Format(FormatArgs),
    /// Play the token game and print the trace.
    Simulate(SimulateArgs),
    /// Build the state graph and run property checks.
    Analyze(AnalyzeArgs),
    /// Print the state graph in Graphviz format.
    ExportDot(ExportDotArgs),
    /// Score a risk register from asset, threat and matrix tables.
    Risk(RiskArgs),
}

#[derive(Debug, Args)]
pub struct FileArgs {
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct FormatArgs {
    pub file: PathBuf,
    /// Exit 1 instead of printing when the file is not canonical.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    /// First enabled transition in declaration order; unset resolutions block.
    Order,
    /// Seeded random choice of transition and of unset resolution values.
    Random,
    /// Follow a script of `t` / `t:b` entries.
    Script,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "order")]
    pub policy: Policy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Script file: entries separated by whitespace, commas or newlines; `#` starts a comment.
    #[arg(long)]
    pub script: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub max_steps: usize,
    /// Print one line per firing.
    #[arg(long)]
    pub trace: bool,
    /// Accepting markings: sinks, any, initial, only:P,.. or marked:P,..
    #[arg(long, default_value = "sinks")]
    pub finals: String,
    /// Initial marking as `P,Q,R=V`; defaults to one token per peripheral position.
    #[arg(long)]
    pub initial: Option<String>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub file: PathBuf,
    /// Comma-separated: safeness, deadlock, coverage, conflict, sequence. Default: all.
    #[arg(long)]
    pub checks: Option<String>,
    #[arg(long, default_value = "sinks")]
    pub finals: String,
    /// Write the state graph here as DOT.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// Stage pattern for the sequence check, e.g. `a ; b:0>0 | b:1 ; c`.
    #[arg(long)]
    pub pattern: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pub max_states: usize,
    #[arg(long)]
    pub initial: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExportDotArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    pub max_states: usize,
    #[arg(long)]
    pub initial: Option<String>,
}

#[derive(Debug, Args)]
pub struct RiskArgs {
    #[arg(long)]
    pub assets: PathBuf,
    #[arg(long)]
    pub threats: PathBuf,
    #[arg(long)]
    pub matrix: PathBuf,
    /// Register output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "2.0")]
    pub treat_threshold: String,
    #[arg(long, default_value = "100")]
    pub unit_cost: String,
    /// Route the tables through an EN_Def defining session and check it agrees with the direct computation.
    #[arg(long)]
    pub via_net: bool,
    #[arg(long, default_value = "")]
    pub operator: String,
    /// Hand-over preference for the session: none, calculation or assessment.
    #[arg(long, default_value = "none")]
    pub routing: String,
}
