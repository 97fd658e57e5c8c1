//! `posred`: decide, trace, and verify the OddMaxSat reduction from the
//! command line.
//!
//! Exit codes: 0 accept/ok/yes, 1 reject/violation/no, 2 usage or input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "posred", version, about = "Positive oracle reduction from OddMaxSat to Sat join co-Sat")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the machine with the Sat ⊕ co-Sat oracle.
    Decide {
        formula: String,
        /// Print every query, answer, and case.
        #[arg(long)]
        trace: bool,
    },
    /// Print the lexicographically maximum satisfying assignment.
    Lexmax { formula: String },
    /// Compare the machine against the reference OddMaxSat decider.
    VerifyEquivalence(EquivalenceArgs),
    /// Check that the machine is monotone in its oracle.
    VerifyPositivity(PositivityArgs),
    /// Dump the tree of all computations over all oracle answers.
    Tree { formula: String },
    /// Ask the Sat ⊕ co-Sat oracle about a raw query (body followed by tag).
    Oracle {
        query: String,
        /// Decide with a single SAT call and report it.
        #[arg(long)]
        one_query: bool,
    },
}

#[derive(Args, Debug)]
pub struct EquivalenceArgs {
    /// Corpus file, one formula per line.
    #[arg(long, conflicts_with_all = ["random", "max_vars", "size"])]
    pub corpus: Option<PathBuf>,
    /// Number of random formulas.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub max_vars: u32,
    /// Node budget per random formula.
    #[arg(long, default_value_t = 25)]
    pub size: usize,
}

#[derive(Args, Debug)]
pub struct PositivityArgs {
    #[arg(required_unless_present = "corpus", conflicts_with = "corpus")]
    pub formula: Option<String>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Check every pair S ⊆ T of the query universe (|U| ≤ 12).
    #[arg(long, conflicts_with = "samples")]
    pub exhaustive: bool,
    /// Check this many sampled pairs.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Machine to check; the mutants exist to show the checker can fail.
    #[arg(long, value_enum, default_value_t = MachineArg::Standard)]
    pub machine: MachineArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MachineArg {
    Standard,
    SwapBothCases,
    SwapContinuation,
    FlipFinalIteration,
}

impl From<MachineArg> for posred_core::Machine {
    fn from(arg: MachineArg) -> Self {
        use posred_core::Machine;
        match arg {
            MachineArg::Standard => Machine::Standard,
            MachineArg::SwapBothCases => Machine::SwapBothCases,
            MachineArg::SwapContinuation => Machine::SwapContinuation,
            MachineArg::FlipFinalIteration => Machine::FlipFinalIteration,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Decide { formula, trace } => commands::decide(&formula, trace, cli.json),
        Command::Lexmax { formula } => commands::lexmax(&formula, cli.json),
        Command::VerifyEquivalence(args) => commands::verify_equivalence(&args, cli.seed, cli.json),
        Command::VerifyPositivity(args) => commands::verify_positivity(&args, cli.seed, cli.json),
        Command::Tree { formula } => commands::tree(&formula, cli.json),
        Command::Oracle { query, one_query } => commands::oracle(&query, one_query, cli.json),
    };
    ExitCode::from(code)
}
