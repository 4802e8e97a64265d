//! `lchoose`: build, verify and inspect K_t-minor-free graphs that are not
//! λ-choosable.
//!
//! Every command prints one JSON report on stdout and exits with 0 when the checked
//! property holds (or the object was built), 1 when it fails, 2 when a budget or cap
//! ran out, and 3 on invalid input.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "lchoose", version, about = "K_t-minor-free graphs that are not λ-choosable")]
struct Cli {
    /// Suppress the one-line summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads for parallel checks (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a construction.
    #[command(subcommand)]
    Build(BuildCmd),
    /// Verify a witness file or a per-copy directory.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Check a colouring question or a list assignment.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Exact K_t-minor search; holds when there is no K_t minor.
    Minor(MinorArgs),
    /// Decide lhs ≤ rhs in the refinement order.
    Order {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Two-clique graphs with few non-neighbours and no large clique minor.
    #[command(subcommand)]
    Steiner(SteinerCmd),
    /// Glue one copy of an obstacle family per proper colouring of h2.
    Compose(ComposeArgs),
}

#[derive(Subcommand)]
enum BuildCmd {
    /// Gadget for λ = {1*(t-2a-6), 3a+6}; writes a witness file.
    Thm2 {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Gadget for λ = {1*(t-5a-9), 3*(2a+3)}; writes a witness file.
    Thm3 {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// One copy of a Steiner graph per injection A -> X; writes a per-copy directory.
    Thmkq {
        #[arg(long)]
        n: usize,
        /// ε' as a fraction eps-num/eps-den.
        #[arg(long)]
        eps_num: u64,
        #[arg(long)]
        eps_den: u64,
        #[arg(long)]
        q: usize,
        /// Comma-separated k_1..k_q.
        #[arg(long, value_delimiter = ',')]
        ks: Vec<u32>,
        /// Steiner graph file to use instead of the cyclic instance.
        #[arg(long)]
        steiner: Option<PathBuf>,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// m-fold variant over the m-subsets of [2nm-1]; writes a per-copy directory.
    Ab {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// ε' as a fraction (default 1/n).
        #[arg(long, requires = "eps_den")]
        eps_num: Option<u64>,
        #[arg(long, requires = "eps_num")]
        eps_den: Option<u64>,
        #[arg(long)]
        steiner: Option<PathBuf>,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Re-check a witness; holds when every check passes.
    Witness {
        file: PathBuf,
        /// exact | certificate | skip
        #[arg(long, default_value = "exact")]
        minor: String,
        /// Write the witness back with its verification block (and h bound) filled in.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a directory written by `build thmkq` or `build ab`.
    Percopy { dir: PathBuf },
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Holds when an L-colouring (b-fold with --b) exists.
    Color {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        lists: PathBuf,
        #[arg(long, default_value_t = 1)]
        b: usize,
        /// JSON object vertex -> colour (or colour set with --b).
        #[arg(long)]
        partial: Option<PathBuf>,
    },
    /// Holds when the lists form a (λ, C)-list assignment.
    Assignment {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        lists: PathBuf,
        #[arg(long)]
        lambda: String,
    },
    /// Holds when the graph is λ-choosable (exhaustive, small graphs only).
    Choosable {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        budget: Option<u64>,
    },
}

#[derive(Args)]
struct MinorArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    t: usize,
    #[arg(long)]
    budget: Option<u64>,
    /// auto | low-deficiency | branch-and-bound
    #[arg(long, default_value = "auto")]
    strategy: String,
}

#[derive(Subcommand)]
enum SteinerCmd {
    /// Sample until an instance verifies; holds when one is found.
    Sample {
        #[arg(long)]
        n: usize,
        /// ε as p/q.
        #[arg(long)]
        eps: String,
        #[arg(long)]
        seed: u64,
        /// Number of attempts.
        #[arg(long)]
        budget: u64,
        #[arg(long)]
        minor_budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exactly verify a Steiner graph file.
    Verify {
        file: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
    },
}

#[derive(Args)]
struct ComposeArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    h2: PathBuf,
    #[arg(long)]
    lists: PathBuf,
    /// Clique-minor order recorded in the output witness (default |V(G)| + 1).
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    // usage errors are invalid input (3), not clap's default 2
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(report::EXIT_INVALID);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("cannot set thread count: {e}");
            return ExitCode::from(report::EXIT_INVALID);
        }
    }
    let started = std::time::Instant::now();
    let (name, result) = commands::run(cli.command);
    let report = report::Report::finish(name, result, started.elapsed());
    println!("{}", serde_json::to_string_pretty(&report.json).expect("report serializes"));
    if !cli.quiet {
        eprintln!("{}", report.summary);
    }
    ExitCode::from(report.code)
}
