//! Command-line front end for `matchscope`.
//!
//! Every command writes one JSON report made of a `header` (tool, version,
//! command line, timestamps, worker count) and a `body` (run manifest and
//! report). The body depends only on the manifest, so two runs with the same
//! parameters produce byte-identical bodies.
//!
//! Exit codes: 0 completed, 2 completed with theorem-discrepancy
//! certificates, 1 usage or configuration error.

mod envelope;
mod group_cmd;
mod linear_cmd;
mod scans;
mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use matchscope_core::group_scan::ScanMode;
use matchscope_core::matching::DEFAULT_CAP;

pub use envelope::{Envelope, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DISCREPANCY: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "matchscope", version, about = "Matchings and acyclic matchings in abelian groups and field extensions")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub(crate) struct GlobalOpts {
    /// Worker threads (0 = one per core)
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Seed for sampled runs
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Maximum number of matchings enumerated per pair
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Wall-clock budget in seconds; unfinished units are reported as not run
    #[arg(long, global = true)]
    budget: Option<f64>,
    /// Write the per-pair JSONL stream (default: next to --out, or pairs.jsonl)
    #[arg(long, global = true, num_args = 0..=1, value_name = "PATH")]
    emit_pairs: Option<Option<PathBuf>>,
    /// Report file; the report goes to stdout otherwise
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Run only units with index % K == I
    #[arg(long, global = true, value_name = "I/K")]
    shard: Option<String>,
    /// Reuse the records of an earlier pair stream with the same manifest
    #[arg(long, global = true, value_name = "PATH")]
    resume: Option<PathBuf>,
    /// Do not print the summary on stderr
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Matchings of a single pair of subsets of a group
    #[command(subcommand)]
    Match(MatchCmd),
    /// Scans over many pairs of subsets
    #[command(subcommand)]
    Scan(ScanCmd),
    /// Matched bases and strong matchings of subspaces of a field extension
    #[command(subcommand)]
    Linear(LinearCmd),
    /// Replay certificates, alone or embedded in a report
    Verify {
        #[arg(long, value_name = "PATH")]
        certificate: PathBuf,
    },
    /// Merge pair streams produced under one manifest and rebuild the report
    Merge {
        #[arg(required = true, value_name = "STREAM")]
        inputs: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub(crate) struct PairArgs {
    /// Group descriptor: z<n>, z<n>xz<m>..., free<k>
    #[arg(long)]
    group: String,
    /// Elements of A, e.g. "0,2" or "(1,0);(0,1)"
    #[arg(long = "set-a", allow_hyphen_values = true)]
    set_a: String,
    #[arg(long = "set-b", allow_hyphen_values = true)]
    set_b: String,
}

#[derive(Debug, Subcommand)]
enum MatchCmd {
    /// A matching, or a Hall violator proving there is none
    Find(PairArgs),
    /// All matchings with their fingerprints
    Enumerate(PairArgs),
    /// Fingerprint classes and acyclic matchings
    Acyclic(PairArgs),
}

#[derive(Debug, Subcommand)]
enum ScanCmd {
    /// Classify the admissible pairs of a finite group
    Group {
        #[arg(long)]
        group: String,
        /// Largest subset size (default: order - 1)
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long, default_value = "exhaustive", value_parser = parse_mode)]
        mode: ScanMode,
        /// Pairs drawn in sampled mode
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Classify Z/p for several primes
    Primes {
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 5)]
        max_size: usize,
        #[arg(long, default_value = "exhaustive", value_parser = parse_mode)]
        mode: ScanMode,
    },
    /// Sample pairs from a window of Z^k
    Free {
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long, default_value_t = 10)]
        window: u32,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        max_size: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub(crate) struct SubspaceArgs {
    /// gf(p^d)[:modulus], fp(p), q, fp(p)(t), q(t)
    #[arg(long)]
    tower: String,
    /// Generators of A; rational functions are allowed over K(t)
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// Generators of B (polynomials)
    #[arg(long, allow_hyphen_values = true)]
    b: String,
}

#[derive(Debug, Subcommand)]
enum LinearCmd {
    /// Compare AB ∩ A = {0} with the behaviour of isomorphisms A -> B
    StrongCheck {
        #[command(flatten)]
        pair: SubspaceArgs,
        /// Images of the generators of A; tests this map only
        #[arg(long, allow_hyphen_values = true)]
        map: Option<String>,
        /// Random isomorphisms tested when no map is given
        #[arg(long, default_value_t = 20)]
        isomorphisms: usize,
        /// Random bases per map when the base field is infinite
        #[arg(long, default_value_t = 20)]
        bases: usize,
    },
    /// Is A matched to B, or is a given basis of A matched to some basis of B
    MatchedCheck {
        #[command(flatten)]
        pair: SubspaceArgs,
        /// An ordered basis of A
        #[arg(long, allow_hyphen_values = true)]
        basis_a: Option<String>,
        /// Random bases of A when the base field is infinite
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Linear matching property over all pairs of subspaces of one dimension
    ScanProperty {
        #[arg(long)]
        tower: String,
        #[arg(long)]
        dim: usize,
    },
    /// Search every admissible pair for an acyclic strong matching
    ScanAcyclic {
        #[arg(long)]
        tower: String,
        #[arg(long)]
        dim: usize,
        /// Generator degree bound for K(t)
        #[arg(long, default_value_t = 3)]
        max_deg: usize,
        /// Sampled pairs for K(t)
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
}

fn parse_mode(s: &str) -> Result<ScanMode, String> {
    s.parse().map_err(|e: matchscope_core::Error| e.to_string())
}

/// Context shared by all commands.
pub(crate) struct Ctx {
    pub global: GlobalOpts,
    pub command_line: Vec<String>,
    pub started_at: String,
}

/// Runs the tool on `argv` (including the program name) and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let ctx = Ctx { global: cli.global, command_line: argv, started_at: envelope::now() };
    match dispatch(&ctx, cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn dispatch(ctx: &Ctx, command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Match(m) => match m {
            MatchCmd::Find(p) => group_cmd::find(ctx, &p),
            MatchCmd::Enumerate(p) => group_cmd::enumerate(ctx, &p),
            MatchCmd::Acyclic(p) => group_cmd::acyclic(ctx, &p),
        },
        Command::Scan(s) => match s {
            ScanCmd::Group { group, max_size, mode, samples } => {
                scans::scan_group(ctx, group, max_size, mode, samples)
            }
            ScanCmd::Primes { primes, max_size, mode } => scans::scan_primes(ctx, primes, max_size, mode),
            ScanCmd::Free { rank, window, samples, max_size } => scans::scan_free(ctx, rank, window, samples, max_size),
        },
        Command::Linear(l) => match l {
            LinearCmd::StrongCheck { pair, map, isomorphisms, bases } => {
                linear_cmd::strong_check(ctx, &pair, map.as_deref(), isomorphisms, bases)
            }
            LinearCmd::MatchedCheck { pair, basis_a, samples } => {
                linear_cmd::matched_check(ctx, &pair, basis_a.as_deref(), samples)
            }
            LinearCmd::ScanProperty { tower, dim } => scans::scan_property(ctx, tower, dim),
            LinearCmd::ScanAcyclic { tower, dim, max_deg, samples } => {
                scans::scan_acyclic(ctx, tower, dim, max_deg, samples)
            }
        },
        Command::Verify { certificate } => verify::run(ctx, &certificate),
        Command::Merge { inputs } => scans::merge(ctx, &inputs),
    }
}
